"""Time the numba kernels against the numpy fallbacks on the same inputs.

    python3 benchmarks/bench_accel.py [--repeat 3] [--n 4096]

Each kernel is called once untimed (JIT warm-up), then the best of
``--repeat`` runs is reported together with the max abs difference between
the two backends.
"""

import argparse
import time

import numpy as np

from khcert._accel import _numba, _numpy
from khcert.pointgen import gen_halton, gen_fibonacci_sphere, rng_from_seed


def _cases(n):
    rng = rng_from_seed(1)
    pts = gen_halton(n, 2).points
    w = np.full(n, 1.0 / n)
    xs = rng.random((2048, 2))
    ranks = []
    grids = []
    for k in range(2):
        g = np.append(np.unique(pts[:, k]), 1.0)
        grids.append(g)
        ranks.append(np.searchsorted(g, pts[:, k]).astype(np.int64))
    order = np.argsort(ranks[0], kind="stable")
    r0, r1 = ranks[0][order].copy(), ranks[1][order].copy()
    sph = gen_fibonacci_sphere(n).points
    centers = rng.random((1024, 3)) - 0.5
    centers /= np.linalg.norm(centers, axis=1)[:, None]
    tri = np.array([[0.1, 0.1], [0.9, 0.2], [0.4, 0.8]])
    lo = rng.random((4096, 2)) * 0.5
    hi = lo + 0.3
    ts = np.linspace(0.0, 500.0, 20001)
    radii = np.linspace(1.0, 2.0, 64)
    return {
        "star_disc_2d": lambda m: m.star_disc_2d(r0, r1, grids[0], grids[1], float(n)),
        "periodic_box_sums": lambda m: m.periodic_box_sums(xs, np.full(2, -0.3), np.full(2, 0.3), pts, w),
        "periodic_ball_sums": lambda m: m.periodic_ball_sums(xs, 0.25, pts, w),
        "cap_sums": lambda m: m.cap_sums(centers, np.cos(1.0), sph, w),
        "polygon_box_areas": lambda m: m.polygon_box_areas(tri, lo, hi),
        "bessel_j": lambda m: m.bessel_j(1.0, ts),
        "bessel_scan": lambda m: m.bessel_scan(1.0, radii, 10_000, 1.3),
        "legendre_table": lambda m: m.legendre_table(2000, np.linspace(-1.0, 1.0, 64)),
    }


def _best(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--n", type=int, default=4096, help="point count")
    args = ap.parse_args(argv)

    print(f"{'kernel':<20} {'numba [s]':>10} {'numpy [s]':>10} {'speedup':>8} {'max diff':>10}")
    for name, call in _cases(args.n).items():
        call(_numba)  # compile
        t_nb, a = _best(lambda: call(_numba), args.repeat)
        t_np, b = _best(lambda: call(_numpy), args.repeat)
        diff = float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
        print(f"{name:<20} {t_nb:>10.4f} {t_np:>10.4f} {t_np / t_nb:>8.1f} {diff:>10.2e}")


if __name__ == "__main__":
    main()
