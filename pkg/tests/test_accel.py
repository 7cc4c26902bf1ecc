import os
import subprocess
import sys

import numpy as np
import pytest

from khcert import _accel
from khcert._accel import _numpy
from khcert.pointgen import gen_fibonacci_sphere, gen_halton, rng_from_seed

numba_impl = pytest.importorskip("khcert._accel._numba")


def _rank(pts):
    grids, ranks = [], []
    for k in range(pts.shape[1]):
        g = np.append(np.unique(pts[:, k]), 1.0)
        grids.append(g)
        ranks.append(np.searchsorted(g, pts[:, k]).astype(np.int64))
    order = np.argsort(ranks[0], kind="stable")
    return [np.ascontiguousarray(r[order]) for r in ranks], grids


def _cases():
    rng = rng_from_seed(2)
    pts = gen_halton(300, 2).points
    p3 = rng.random((60, 3))
    w = rng.normal(size=300)
    xs = rng.random((200, 2))
    r2, g2 = _rank(pts)
    r3, g3 = _rank(p3)
    sph = gen_fibonacci_sphere(200).points
    centers = sph[::7].copy()
    tri = np.array([[0.1, 0.1], [0.9, 0.2], [0.4, 0.8]])
    lo = rng.random((100, 2)) * 0.6
    hi = lo + rng.random((100, 2)) * 0.5
    return {
        "radical_inverse": lambda m: m.radical_inverse(np.arange(1, 500, dtype=np.int64), 3),
        "star_disc_1d": lambda m: m.star_disc_1d(r2[0], g2[0], 300.0),
        "star_disc_2d": lambda m: m.star_disc_2d(r2[0], r2[1], g2[0], g2[1], 300.0),
        "star_disc_3d": lambda m: m.star_disc_3d(*r3, *g3, 60.0),
        "box_sums": lambda m: m.box_sums(lo, hi, pts, w),
        "periodic_box_sums": lambda m: m.periodic_box_sums(xs, np.full(2, -0.2), np.full(2, 0.3), pts, w),
        "periodic_ball_sums": lambda m: m.periodic_ball_sums(xs, 0.3, pts, w),
        "cap_sums": lambda m: m.cap_sums(centers, np.cos(0.8), sph, np.full(200, 0.005)),
        "polygon_box_areas": lambda m: m.polygon_box_areas(tri, lo, hi),
        "disc_box_areas": lambda m: m.disc_box_areas(0.5, 0.5, 0.3, lo, hi),
        "bessel_j": lambda m: m.bessel_j(1.5, np.linspace(0.0, 3000.0, 5001)),
        "bessel_scan": lambda m: m.bessel_scan(1.0, np.linspace(1.0, 2.0, 8), 2000, 1.3),
        "legendre_table": lambda m: m.legendre_table(300, np.linspace(-1.0, 1.0, 33)),
    }


@pytest.mark.parametrize("name", list(_cases()))
def test_backends_agree(name):
    call = _cases()[name]
    a = np.asarray(call(numba_impl), dtype=complex)
    b = np.asarray(call(_numpy), dtype=complex)
    assert a.shape == b.shape
    assert np.max(np.abs(a - b)) <= 1e-9 * max(1.0, float(np.max(np.abs(b))))


def test_default_backend_is_numba():
    if os.environ.get("KHCERT_DISABLE_NUMBA"):
        pytest.skip("numba disabled in this environment")
    assert _accel.BACKEND == "numba"


def test_environment_flag_selects_numpy():
    code = "from khcert import _accel; from khcert.discrepancy import star_discrepancy_exact; " \
           "from khcert.pointgen import gen_halton; " \
           "print(_accel.BACKEND, repr(star_discrepancy_exact(gen_halton(64, 2)).value))"
    env = dict(os.environ, KHCERT_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, value = out.stdout.split()
    assert backend == "numpy"
    from khcert.discrepancy import star_discrepancy_exact

    assert float(value) == pytest.approx(star_discrepancy_exact(gen_halton(64, 2)).value, abs=1e-15)
