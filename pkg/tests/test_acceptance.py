"""Acceptance suite: one summary line per criterion, printed at the end of the run."""

import math
import time

import numpy as np

from khcert.calculus import (
    GridConfig,
    _gauss01,
    apply_D_fourier,
    apply_D_spatial,
    callback_from_trig,
    pair,
    random_trig_poly,
)
from khcert.discrepancy import star_discrepancy_exact
from khcert.harness import canonical_json, default_matrix, run_experiment, sec4_application
from khcert.kernels import GOLDEN_SIDE, check_diophantine, interval_kernel_coeff, scan_bessel_radius
from khcert.pointgen import PointSet, gen_fibonacci_sphere, rng_from_seed
from khcert.regions import SignedMeasure
from khcert.sphere import (
    FullSphere,
    PairCap,
    SingleCap,
    SphereConfig,
    SphereMeasure,
    cap_l2_discrepancy,
    hemisphere,
    sphere_ratio_study,
    verify_kh_sphere,
    verify_phi_growth,
    zonal,
)

SEED = 0
FIRST_RUNS = {}  # canonical JSON of earlier runs, re-checked by the determinism criterion


def _remember(key, payload):
    FIRST_RUNS[key] = canonical_json(payload)
    return payload


def _run_matrix(variant):
    reports = []
    for cfg in default_matrix(n=4096, seed=SEED, variants=(variant,)):
        reports.extend(run_experiment(cfg))
    return reports


# 1 ------------------------------------------------------------ duality


def test_criterion_01_duality_identity(acceptance):
    t0 = time.perf_counter()
    rng = rng_from_seed(101)
    worst = 0.0
    for i in range(50):
        d = 1 + i % 3
        f = random_trig_poly(rng, d, int(rng.integers(1, 9)), int(rng.integers(1, 30)))
        n_pts = int(rng.integers(1, 65))
        mu = SignedMeasure.qmc(PointSet(rng.random((n_pts, d))))
        mu_hat = mu.fourier(f.freqs)
        lhs = pair(f, mu)
        g_hat = interval_kernel_coeff(f.freqs)
        rhs = complex(np.sum(apply_D_fourier(f).amps * np.conj(g_hat * mu_hat)))
        direct = complex(np.mean(f(mu.atoms))) - f.coeff((0,) * d)
        scale = max(1.0, float(np.sum(np.abs(f.amps))))
        worst = max(worst, abs(lhs - rhs) / scale, abs(lhs - direct) / scale)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-10 and dt < 5.0
    acceptance(1, ok, f"duality identity, 50 polynomials: max gap {worst:.2e} (tol 1e-10, limit 5 s)", dt)
    assert ok


# 2 ------------------------------------------------- operator equivalence


def test_criterion_02_operator_equivalence(acceptance):
    t0 = time.perf_counter()
    rng = rng_from_seed(202)
    worst = 0.0
    for i in range(200):
        d = 1 + i % 3
        degree = int(rng.integers(1, 9))
        f = random_trig_poly(rng, d, degree, int(rng.integers(1, 13)))
        spatial_f = callback_from_trig(f, exact_partials=True)
        xs = rng.random((100, d))
        ref = apply_D_fourier(f)(xs)
        # the midpoint rule with more nodes than the degree averages trig terms exactly
        got = apply_D_spatial(spatial_f, xs, GridConfig(degree + 1))
        worst = max(worst, float(np.max(np.abs(got - ref) / np.maximum(1.0, np.abs(ref)))))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and dt < 10.0
    acceptance(2, ok, f"spatial vs Fourier operator, 200 x 100 points: max gap {worst:.2e} (tol 1e-8, limit 10 s)", dt)
    assert ok


# 3 -------------------------------------------------- kernel coefficients


def test_criterion_03_kernel_coefficients(acceptance):
    x, w = _gauss01(64)
    worst = 0.0
    for d in (1, 2):
        grids = np.meshgrid(*[x] * d, indexing="ij")
        wgrid = np.prod(np.meshgrid(*[w] * d, indexing="ij"), axis=0).ravel()
        pts = np.stack([g.ravel() for g in grids], axis=1)
        h = np.prod(1.0 - pts, axis=1)
        r = np.arange(-5, 6)
        freqs = np.stack(np.meshgrid(*[r] * d, indexing="ij"), -1).reshape(-1, d)
        quad = (np.exp(-2j * np.pi * freqs @ pts.T) * h) @ wgrid
        worst = max(worst, float(np.max(np.abs(quad - interval_kernel_coeff(freqs)))))
    ok = worst <= 1e-12
    acceptance(3, ok, f"kernel coefficients |n_k| <= 5, d <= 2: max gap {worst:.2e} (tol 1e-12)")
    assert ok


# 4 ------------------------------------------------------ interval matrix


def test_criterion_04_interval_matrix(acceptance):
    t0 = time.perf_counter()
    reports = _remember("thm1", _run_matrix("thm1"))
    dt = time.perf_counter() - t0
    failed = [r["experiment"] for r in reports if not r["passed"]]
    ok = len(reports) == 27 and not failed and dt < 300.0
    worst = max(r["ratio"] for r in reports)
    acceptance(4, ok, f"interval bound, 27 runs at N=4096: {27 - len(failed)}/27 pass, max lhs/rhs {worst:.3f} (limit 300 s)", dt)
    assert ok, failed


# 5 ---------------------------------------------------------- cube matrix


def test_criterion_05_cube_matrix(acceptance):
    t0 = time.perf_counter()
    dio = check_diophantine(GOLDEN_SIDE, 0.0, 2.0, 100_000)
    dio = check_diophantine(GOLDEN_SIDE, dio.worst, 2.0, 100_000)
    reports = _remember("thm8", _run_matrix("thm8"))
    dt = time.perf_counter() - t0
    failed = [r["experiment"] for r in reports if not r["passed"]]
    deltas = {r["components"]["diophantine"]["delta_used"] for r in reports}
    ok = dio.ok and dio.worst > 0 and not failed and len(reports) == 18
    acceptance(
        5, ok,
        f"cube bound, a=(sqrt5-1)/2, gamma=2, kmax=1e5, delta={dio.worst:.6f} at (h,k)=({dio.h},{dio.k}): "
        f"{18 - len(failed)}/18 pass (delta used {sorted(deltas)[0]:.6f})",
        dt,
    )
    assert ok, failed


# 6 ---------------------------------------------------------- ball matrix


def test_criterion_06_ball_matrix(acceptance):
    t0 = time.perf_counter()
    scan = scan_bessel_radius(1.0, 1.0, 2.0, 1.3, 10_000)
    reports = _remember("thm10", _run_matrix("thm10"))
    dt = time.perf_counter() - t0
    failed = [r["experiment"] for r in reports if not r["passed"]]
    radii = {round(r["params"]["r"], 15) for r in reports}
    ok = scan.c > 0 and not failed and len(reports) == 18 and radii == {round(scan.r / (2 * math.pi), 15)}
    acceptance(
        6, ok,
        f"ball bound, scan alpha=1 beta=1.3 K=1e4: Bessel arg {scan.r:.6f}, c={scan.c:.3e}, "
        f"radius {scan.r / (2 * math.pi):.6f}: {18 - len(failed)}/18 pass",
        dt,
    )
    assert ok, failed


# 7 ------------------------------------------------------ star discrepancy


def _grid_star(x, cells=100):
    g = np.arange(1, cells + 1) / cells
    tt = np.stack(np.meshgrid(g, g, indexing="ij"), -1).reshape(-1, 2)
    counts = np.sum(np.all(x[None, :, :] <= tt[:, None, :], axis=2), axis=1) / x.shape[0]
    return float(np.max(np.abs(counts - np.prod(tt, axis=1))))


def test_criterion_07_star_discrepancy(acceptance):
    rng = rng_from_seed(707)
    cell = 1.0 / 100
    worst_grid = 0.0
    for _ in range(20):
        x = rng.random((int(rng.integers(1, 33)), 2))
        exact = star_discrepancy_exact(PointSet(x)).value
        grid = _grid_star(x)
        # the grid sup is a lower bound; snapping the extremal corner to the grid moves
        # the box volume by at most one cell width per coordinate
        assert grid <= exact + 1e-14
        worst_grid = max(worst_grid, exact - grid)
    worst_1d = 0.0
    for _ in range(20):
        x = np.sort(rng.random(int(rng.integers(1, 65))))
        n = len(x)
        closed = 1 / (2 * n) + np.max(np.abs(x - (2 * np.arange(1, n + 1) - 1) / (2 * n)))
        worst_1d = max(worst_1d, abs(star_discrepancy_exact(PointSet(x[:, None])).value - closed))
    ok = worst_grid <= 2 * cell and worst_1d <= 1e-12
    acceptance(
        7, ok,
        f"exact star discrepancy: 10^4-cell grid gap {worst_grid:.4f} (tol one cell, {2 * cell}), "
        f"d=1 closed form gap {worst_1d:.1e} (tol 1e-12)",
    )
    assert ok


# 8 ------------------------------------------------------ multiplier growth


def test_criterion_08_multiplier_growth(acceptance):
    pair_g = verify_phi_growth(1.0, 2000, "pair")
    single_g = verify_phi_growth(1.0, 2000, "single")
    ratio = pair_g.c2 / pair_g.c1
    ok = pair_g.c1 > 0 and ratio <= 50 and 1.35 <= pair_g.slope <= 1.65 and single_g.slope <= 2.51
    acceptance(
        8, ok,
        f"cap multiplier growth, theta=1, n<=2000: pair c1={pair_g.c1:.3f} c2={pair_g.c2:.3f} "
        f"c2/c1={ratio:.2f} slope={pair_g.slope:.3f}; single slope={single_g.slope:.3f} (<= 2.51)",
    )
    assert ok


# 9 ------------------------------------------------------ sphere pipeline


def test_criterion_09_sphere_pipeline(acceptance):
    t0 = time.perf_counter()
    f = zonal([0.2, 0.3, 0.2, 0.1, 0.05])
    cfg = SphereConfig(seed=SEED)
    ns = [250, 1000, 4000]
    studies = {
        name: sphere_ratio_study(f, hemisphere(), ns, 1.0, variant, cfg)
        for name, variant in (("pair", PairCap()), ("single", SingleCap()))
    }
    _remember("sphere", {k: v.to_dict() for k, v in studies.items()})
    theta = 1.0
    mc = cap_l2_discrepancy(FullSphere(), SphereMeasure.uniform_only(), theta, seed=SEED, method="monte-carlo")
    target = (1 - math.cos(theta)) / 2
    uniform_ok = abs(mc.value - target) <= 4 * mc.stderr
    dt = time.perf_counter() - t0
    ratios = {k: "[" + ", ".join(f"{r['ratio']:.2e}" for r in s.rows) + "]" for k, s in studies.items()}
    ok = all(s.passed for s in studies.values()) and uniform_ok
    acceptance(
        9, ok,
        f"sphere hemisphere N={ns}: ratios pair {ratios['pair']} single {ratios['single']} (each <= 2x previous); "
        f"uniform-only {mc.value:.6f} +- {mc.stderr:.1e} vs {target:.6f} (4 sigma)",
        dt,
    )
    assert ok


# 10 --------------------------------------------- singular-simplex study


def test_criterion_10_singular_simplex(acceptance):
    t0 = time.perf_counter()
    table = sec4_application(eps=(0.1, 0.05, 0.025), ns=(256, 1024, 4096), seed=SEED, margin_n=4096)
    _remember("sec4", table.to_dict())
    dt = time.perf_counter() - t0
    margins = [r for r in table.rows if r["N"] == 4096]
    margin_txt = ", ".join(f"eps={r['eps']}: bound/error={r['bound'] / r['error']:.1f}" for r in margins)
    for note in table.margin_notes:
        print("margin:", note)
    ok = table.exponent_ok and table.all_rows_pass
    acceptance(
        10, ok,
        f"singular simplex: variation exponent {table.variation_exponent:.3f} (limit {table.exponent_limit}), "
        f"all-orders exponent {table.all_orders_exponent:.3f}, rows pass {table.all_rows_pass}; "
        f"margins at N=4096 {margin_txt}",
        dt,
    )
    assert table.all_rows_pass
    assert table.exponent_ok, (
        f"variation grows like eps^-{table.variation_exponent:.3f}, above eps^-{table.exponent_limit}"
    )


# 11 ---------------------------------------------------------- determinism


def test_criterion_11_determinism(acceptance):
    t0 = time.perf_counter()
    reruns = {
        "thm1": lambda: _run_matrix("thm1"),
        "thm8": lambda: _run_matrix("thm8"),
        "thm10": lambda: _run_matrix("thm10"),
        "sphere": lambda: {
            name: sphere_ratio_study(
                zonal([0.2, 0.3, 0.2, 0.1, 0.05]), hemisphere(), [250, 1000, 4000], 1.0, variant, SphereConfig(seed=SEED)
            ).to_dict()
            for name, variant in (("pair", PairCap()), ("single", SingleCap()))
        },
        "sec4": lambda: sec4_application(
            eps=(0.1, 0.05, 0.025), ns=(256, 1024, 4096), seed=SEED, margin_n=4096
        ).to_dict(),
    }
    same = {}
    for key, fn in reruns.items():
        first = FIRST_RUNS.get(key) or canonical_json(fn())
        same[key] = canonical_json(fn()) == first
    pts_same = gen_fibonacci_sphere(100).points.tobytes() == gen_fibonacci_sphere(100).points.tobytes()
    check = verify_kh_sphere(zonal([0.1, 0.2]), hemisphere(), gen_fibonacci_sphere(64), 1.0)
    check_same = canonical_json(check.to_dict()) == canonical_json(
        verify_kh_sphere(zonal([0.1, 0.2]), hemisphere(), gen_fibonacci_sphere(64), 1.0).to_dict()
    )
    dt = time.perf_counter() - t0
    ok = all(same.values()) and pts_same and check_same
    acceptance(11, ok, f"repeat runs byte-identical: {', '.join(f'{k}={v}' for k, v in same.items())}", dt)
    assert ok
