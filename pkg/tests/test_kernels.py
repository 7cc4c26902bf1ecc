import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given
from hypothesis import strategies as st

from khcert.calculus import _gauss01, d_multiplier, disc_rule
from khcert.errors import (
    InvalidParameterError,
    UnsupportedOrderError,
    ZeroCoefficientError,
)
from khcert.kernels import (
    GOLDEN_SIDE,
    CoefficientRule,
    ball_kernel_coeff,
    bessel_j,
    bessel_lower_bound,
    check_diophantine,
    cube_constant,
    cube_kernel_coeff,
    interval_kernel_coeff,
    interval_kernel_spatial,
    scan_bessel_radius,
)

# ------------------------------------------------------------- interval


def test_interval_coefficient_examples():
    assert interval_kernel_coeff((0, 0)) == pytest.approx(0.25)
    assert interval_kernel_coeff((1,)) == pytest.approx(1 / (2j * math.pi))


def test_interval_coefficients_match_quadrature():
    x, w = _gauss01(64)
    for n in range(-5, 6):
        quad = np.sum(interval_kernel_spatial(x[:, None]) * np.exp(-2j * math.pi * n * x) * w)
        assert abs(quad - interval_kernel_coeff((n,))) < 1e-12


def test_interval_spatial_domain():
    with pytest.raises(InvalidParameterError):
        interval_kernel_spatial([1.0])


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=4))
def test_kernel_inverse_is_conjugate_of_operator_multiplier(n):
    g = interval_kernel_coeff(tuple(n))
    m = d_multiplier(np.array([n]))[0]
    assert abs(np.conj(1.0 / g) - m) <= 1e-14 * max(1.0, abs(m))


# ------------------------------------------------------------------ cube


def test_cube_coefficient_examples():
    assert cube_kernel_coeff((0, 0, 0), 0.3) == pytest.approx(0.027)
    assert cube_kernel_coeff((1,), 0.5) == pytest.approx(1 / math.pi)
    assert cube_kernel_coeff((2,), 0.5) == 0.0
    assert cube_kernel_coeff((3,), Fraction(1, 3)) == 0.0
    with pytest.raises(ZeroCoefficientError, match=r"\(2,\)"):
        CoefficientRule("cube", 1, a=0.5).coeff([[2]])


def test_cube_coefficients_match_quadrature():
    a = 0.37
    x, w = _gauss01(64)
    x, w = a * x, a * w
    for n in range(-4, 5):
        quad = np.sum(np.exp(-2j * math.pi * n * x) * w)
        assert abs(abs(quad) - abs(cube_kernel_coeff((n,), a))) < 1e-12


def test_cube_side_range():
    with pytest.raises(InvalidParameterError):
        cube_kernel_coeff((1,), 1.0)


def test_cube_constant_bounds_inverse_coefficients():
    a, gamma, d = GOLDEN_SIDE, 2.0, 2
    dio = check_diophantine(a, 0.0, gamma, 2000)
    c = cube_constant(a, dio.worst, d)
    n = np.array([[i, j] for i in range(-40, 41) for j in range(-40, 41)])
    inv = 1.0 / np.abs(cube_kernel_coeff(n, a))
    weight = np.prod((1.0 + np.abs(n)) ** gamma, axis=1)
    assert np.all(inv <= c * weight * (1 + 1e-12))


# ------------------------------------------------------------------ ball


def test_ball_coefficient_examples():
    assert ball_kernel_coeff((0, 0), 0.25) == pytest.approx(math.pi / 16)
    assert ball_kernel_coeff((0, 0, 0), 0.5) == pytest.approx(4 / 3 * math.pi / 8)


def test_ball_coefficients_match_quadrature():
    r = 0.3
    pts, w = disc_rule(np.zeros(2), r, 48)
    for n in [(1, 0), (2, 1), (0, 3), (-2, 2)]:
        quad = np.sum(np.exp(-2j * math.pi * pts @ np.array(n, float)) * w)
        assert abs(quad - ball_kernel_coeff(n, r)) < 1e-6


def test_bessel_half_integer_closed_form():
    t = np.linspace(0.1, 50.0, 500)
    closed = np.sqrt(2 / (math.pi * t)) * (np.sin(t) / t - np.cos(t))
    assert np.max(np.abs(bessel_j(1.5, t) - closed)) < 1e-12


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.7])
def test_bessel_matches_reference(alpha):
    t = np.concatenate([np.linspace(0.0, 50.0, 2001), np.linspace(50.0, 1e4, 4001)])
    if alpha < 0:
        t = t[1:]  # J_{-1/2} is unbounded at 0
    assert np.max(np.abs(bessel_j(alpha, t) - sp.jv(alpha, t))) <= 1e-9


def test_bessel_matches_mpmath_spot_values():
    mpmath = pytest.importorskip("mpmath")
    for alpha, t in [(1.0, 3.0), (1.5, 123.4), (2.0, 9876.5), (0.5, 0.01)]:
        assert abs(bessel_j(alpha, t) - float(mpmath.besselj(alpha, t))) < 1e-12


def test_bessel_zeros_and_recurrence():
    assert abs(bessel_j(0.5, math.pi)) < 1e-15
    assert bessel_j(1.0, 3.8316) * bessel_j(1.0, 3.8318) < 0
    t = np.linspace(0.5, 200, 400)
    for a in (0.5, 1.0, 2.0):
        lhs = bessel_j(a - 1, t) + bessel_j(a + 1, t)
        assert np.max(np.abs(lhs - 2 * a / t * bessel_j(a, t))) < 1e-8


def test_bessel_order_and_argument_checks():
    with pytest.raises(UnsupportedOrderError):
        bessel_j(-1.0, 1.0)
    with pytest.raises(InvalidParameterError):
        bessel_j(1.0, -1.0)


def test_bessel_radius_scan():
    a = scan_bessel_radius(1.0, 1.0, 2.0, 1.3, 1000, grid=64)
    b = scan_bessel_radius(1.0, 1.0, 2.0, 1.3, 1000, grid=64)
    assert a == b
    assert a.c > 0 and 1.0 < a.r < 2.0
    assert a.c == pytest.approx(bessel_lower_bound(1.0, a.r, 1.3, 1000))
    assert [k for k, _ in a.trend] == [100, 1000]
    # K = 1: the bound is just |J(r)|
    assert bessel_lower_bound(1.0, 1.5, 1.3, 1) == pytest.approx(abs(sp.jv(1.0, 1.5)))


def test_bessel_scan_checks_and_trend_for_small_beta():
    with pytest.raises(InvalidParameterError):
        scan_bessel_radius(1.0, 1.0, 2.0, 0.7, 100)
    res = scan_bessel_radius(1.0, 1.0, 2.0, 0.7, 10_000, grid=32, require_hypothesis=False)
    cs = [c for _, c in res.trend]
    assert len(cs) == 3 and all(c2 <= c1 for c1, c2 in zip(cs, cs[1:]))


# ---------------------------------------------------------- diophantine


def test_diophantine_examples():
    res = check_diophantine(GOLDEN_SIDE, 0.3, 2.0, 10_000)
    assert res.ok and (res.h, res.k) == (1, 1)
    assert res.worst == pytest.approx(0.381966, abs=1e-6)
    half = check_diophantine(Fraction(1, 2), 0.01, 2.0, 100)
    assert not half.ok and (half.h, half.k) == (1, 2)
    assert check_diophantine(math.sqrt(2) - 1, 0.2, 2.0, 10_000).ok


def test_coefficient_rule_kinds():
    with pytest.raises(InvalidParameterError):
        CoefficientRule("sphere", 2)
    with pytest.raises(InvalidParameterError):
        CoefficientRule("ball", 2)
    rule = CoefficientRule("interval", 2)
    assert np.allclose(rule.phi([[1, 0]]), d_multiplier(np.array([[1, 0]])))
