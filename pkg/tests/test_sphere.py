import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import eval_legendre

from khcert.errors import DegenerateThetaError, InvalidParameterError
from khcert.pointgen import gen_fibonacci_sphere, rng_from_seed
from khcert.sphere import (
    CapKernel,
    FullSphere,
    PairCap,
    SingleCap,
    SphereCap,
    SphereConfig,
    SphereMeasure,
    cap_coeffs,
    cap_intersection_area,
    cap_l2_discrepancy,
    cap_phi,
    hemisphere,
    legendre,
    legendre_all,
    sphere_ratio_study,
    parse_sphere_region,
    uniform_sphere,
    verify_kh_sphere,
    verify_phi_growth,
    zonal,
)


def test_legendre_against_reference():
    z = np.linspace(-1, 1, 101)
    for n in (0, 1, 2, 5, 40, 300):
        assert np.max(np.abs(legendre(n, z) - eval_legendre(n, z))) < 1e-12
    tab = legendre_all(10, z)
    assert np.allclose(tab[7], eval_legendre(7, z), atol=1e-13)
    with pytest.raises(InvalidParameterError):
        legendre(2, 1.5)


@pytest.mark.parametrize("theta", [0.3, 1.0, math.pi / 2, 2.5])
def test_cap_coefficients_partial_sum_oracle(theta):
    c = cap_coeffs(theta, 200).coeffs
    z = math.cos(theta)
    n = np.arange(201)
    partial = np.cumsum(c * (2 * n + 1))
    oracle = 1 - (eval_legendre(n, z) + eval_legendre(n + 1, z)) / 2
    assert np.max(np.abs(partial - oracle)) < 1e-12
    assert c[0] == pytest.approx((1 - z) / 2)


def test_cap_expansion_converges_in_l2():
    theta = 1.1
    f = cap_coeffs(theta, 512)
    # L2 error on the sphere from the zonal profile, z uniform on [-1, 1]
    z = np.linspace(-1, 1, 200001)
    err = (f.evaluate(z) - (z >= math.cos(theta))) ** 2
    l2 = math.sqrt(np.trapezoid(err, z) / 2)
    assert l2 <= 0.05


def test_cap_phi_examples():
    single = CapKernel(math.pi / 2)
    assert cap_phi(single, 0) == pytest.approx(2.0)
    assert cap_phi(single, 1) == pytest.approx(4.0)
    pair = CapKernel(math.pi / 3, pair=True)
    assert cap_phi(pair, 0) == pytest.approx(1 / (0.25 + 0.75j))
    with pytest.raises(InvalidParameterError):
        CapKernel(math.pi / 2, pair=True)


def test_degenerate_radius_lists_even_indices():
    k = CapKernel(math.pi / 2)
    assert k.degenerate(10) == [2, 4, 6, 8, 10]
    with pytest.raises(DegenerateThetaError) as info:
        k.phi(10)
    assert info.value.indices[:2] == [2, 4]


@pytest.mark.parametrize("theta", (0.1 + (math.pi / 2 - 0.2) * rng_from_seed(13).random(20)).tolist())
def test_pair_growth_band(theta):
    g = verify_phi_growth(theta, 1000, "pair")
    assert 0 < g.c1 <= g.c2
    assert g.c2 / g.c1 <= 50
    assert 1.35 <= g.slope <= 1.65


def test_single_growth_slope():
    g = verify_phi_growth(1.0, 1000, "single")
    assert g.slope <= 2.51


@given(st.floats(0.05, 3.0), st.floats(0.05, 3.0), st.integers(0, 2**31))
def test_cap_intersection_matches_monte_carlo(t1, t2, seed):
    rng = rng_from_seed(seed)
    c1 = uniform_sphere(rng, 1)[0]
    c2 = uniform_sphere(rng, 1)[0]
    x = uniform_sphere(rng, 200_000)
    mc = np.mean((x @ c1 >= math.cos(t1)) & (x @ c2 >= math.cos(t2)))
    exact = cap_intersection_area(c1[None, :], t1, c2, t2)[0]
    assert abs(exact - mc) <= 5 * math.sqrt(max(mc * (1 - mc), 1e-6) / 200_000) + 1e-9


def test_regions_from_spec():
    assert isinstance(parse_sphere_region("full"), FullSphere)
    assert parse_sphere_region("hemisphere") == hemisphere()
    cap = parse_sphere_region("cap:0.7")
    assert cap.theta == pytest.approx(0.7)
    assert cap.area == pytest.approx((1 - math.cos(0.7)) / 2)


def test_zonal_integrals():
    f = zonal([0.2, 0.3, 0.5])
    assert f.integral(FullSphere()) == pytest.approx(0.2)
    hemi = hemisphere()
    x = uniform_sphere(rng_from_seed(0), 400_000)
    mc = np.mean(np.where(hemi.contains_many(x), f(x), 0.0))
    assert f.integral(hemi) == pytest.approx(mc, abs=3e-3)
    assert f.integral(SphereCap((1.0, 0.0, 0.0), 0.5)) is None


def test_cap_discrepancy_examples():
    assert cap_l2_discrepancy(FullSphere(), SphereMeasure.zero(), 1.0).value == 0.0
    exact = cap_l2_discrepancy(FullSphere(), SphereMeasure.uniform_only(), 1.0)
    assert exact.value == pytest.approx((1 - math.cos(1.0)) / 2, abs=1e-14)
    mc = cap_l2_discrepancy(FullSphere(), SphereMeasure.uniform_only(), 1.0, method="monte-carlo")
    assert abs(mc.value - exact.value) <= 4 * mc.stderr
    vals = [cap_l2_discrepancy(hemisphere(), SphereMeasure.qmc(gen_fibonacci_sphere(n)), 1.0).value for n in (64, 256, 1024)]
    assert vals[0] > vals[1] > vals[2]


def test_verify_sphere_examples():
    pts = gen_fibonacci_sphere(256)
    f = zonal([0.2, 0.3, 0.2, 0.1, 0.05])
    for variant in (PairCap(), SingleCap()):
        rep = verify_kh_sphere(f, hemisphere(), pts, 1.0, variant)
        assert rep.passed and rep.criterion == "explicit-constant"
        assert rep.ratio >= 0
    # odd zonal on the full sphere: exact quadrature error 0 for symmetric sets
    odd = zonal([0.0, 1.0])
    assert verify_kh_sphere(odd, FullSphere(), pts, 1.0).lhs < 1e-12
    with pytest.raises(InvalidParameterError):
        SingleCap(gamma=2.0)


def test_ratio_study_is_stable():
    f = zonal([0.2, 0.3, 0.2, 0.1, 0.05])
    study = sphere_ratio_study(f, hemisphere(), [64, 256, 1024], 1.0, PairCap(), SphereConfig(mx=2048))
    assert study.passed
    assert len(study.rows) == 3
    with pytest.raises(InvalidParameterError):
        sphere_ratio_study(f, hemisphere(), [64, 64], 1.0)


@given(st.floats(0.1, 3.0), st.integers(0, 60))
def test_single_phi_is_reciprocal_of_cap_coefficient(theta, n):
    k = CapKernel(theta)
    c = cap_coeffs(theta, n).coeffs[n]
    if n in k.degenerate(n):
        return
    assert cap_phi(k, n) * c == pytest.approx(1.0, rel=1e-12)
