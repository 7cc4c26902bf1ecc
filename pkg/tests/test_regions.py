import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from khcert.errors import DimensionMismatchError, InvalidParameterError, RegionError
from khcert.pointgen import gen_halton, gen_random, rng_from_seed
from khcert.regions import (
    AnchoredBox,
    AxisBox,
    Ball,
    Clipped,
    Empty,
    FullCube,
    Polytope,
    SignedMeasure,
    VolumeConfig,
    clip,
    measure_of,
    periodized_measure,
    polygon_area,
    region_from_json,
    sec4_simplex,
    volume,
)


def test_contains_examples():
    assert AxisBox([0, 0], [0.5, 0.5]).contains([0.25, 0.25])
    b = Ball([0.3, 0.6], 0.0)
    assert b.contains([0.3, 0.6])
    assert not b.contains([0.3, 0.6000001])
    assert sec4_simplex(0.1).contains([0.5, 0.2])
    assert not sec4_simplex(0.1).contains([0.2, 0.5])  # ordering x1 >= x2
    with pytest.raises(DimensionMismatchError):
        AxisBox([0, 0], [1, 1]).contains([0.5])


def test_closed_boundaries():
    box = AxisBox([0.25, 0.25], [0.5, 0.5])
    assert box.contains([0.5, 0.25])
    assert Ball([0.5, 0.5], 0.25).contains([0.75, 0.5])
    tri = sec4_simplex(0.1)
    assert tri.contains([0.45, 0.45])  # on x1 + x2 = 1 - eps


def test_clip_examples():
    t = np.array([0.3, 0.7])
    c = clip(FullCube(2), AnchoredBox(t, t))
    assert isinstance(c, AxisBox)
    assert np.allclose(c.lo, 0) and np.allclose(c.hi, t)
    far = clip(AxisBox([0.0, 0.0], [0.2, 0.2]), AnchoredBox([0.1, 0.1], [0.6, 0.6]))
    assert isinstance(far, Empty)


def test_clip_simplex_by_unit_box_keeps_membership():
    tri = sec4_simplex(0.1)
    c = clip(tri, AxisBox([0, 0], [1, 1]))
    probes = rng_from_seed(5).random((10_000, 2))
    assert np.array_equal(tri.contains_many(probes), c.contains_many(probes))


def test_volume_examples():
    v = volume(AxisBox([0, 0], [0.5, 0.5]))
    assert v.value == 0.25 and v.stderr == 0 and v.method == "exact"
    assert volume(Ball([0.5, 0.5], 0.25)).value == pytest.approx(math.pi / 16, abs=1e-15)
    tri = sec4_simplex(0.1)
    exact = polygon_area(np.array([[0.1, 0.1], [0.45, 0.45], [0.8, 0.1]]))
    assert tri.exact_volume() == pytest.approx(exact, abs=1e-15)
    mc = volume(tri, VolumeConfig(10**6, 0, "monte-carlo"))
    assert abs(mc.value - exact) <= 4 * mc.stderr
    assert mc.stderr > 0 and mc.method == "monte-carlo"


def test_exact_polygon_and_disc_box_areas_against_monte_carlo():
    rng = rng_from_seed(11)
    lo = rng.random((20, 2)) * 0.6
    hi = lo + 0.1 + rng.random((20, 2)) * 0.3
    cloud = rng.random((400_000, 2))
    for region in (sec4_simplex(0.05), Ball([0.4, 0.45], 0.3)):
        exact = region.box_areas(lo, hi)
        inside = region.contains_many(cloud)
        for i in range(20):
            sel = inside & np.all((cloud >= lo[i]) & (cloud <= hi[i]), axis=1)
            assert abs(sel.mean() - exact[i]) < 3e-3


@pytest.mark.parametrize(
    "region",
    [sec4_simplex(0.1), Ball([0.5, 0.5], 0.25), AxisBox([0.1, 0.2], [0.6, 0.5]), Ball([0.3, 0.4, 0.5], 0.2)],
    ids=["simplex", "disc", "box", "ball3"],
)
def test_monte_carlo_volume_coverage(region):
    exact = region.exact_volume()
    hits = 0
    for seed in range(100):
        v = volume(region, VolumeConfig(4096, seed, "monte-carlo"))
        hits += abs(v.value - exact) <= 4 * v.stderr
    assert hits >= 99


def test_volume_is_seed_deterministic():
    poly = Polytope([[1, 1, 1]], [0.8])
    a = volume(poly, VolumeConfig(5000, 3))
    b = volume(poly, VolumeConfig(5000, 3))
    assert a == b and a.stderr > 0


def test_measure_of_examples():
    mu = SignedMeasure.qmc(np.array([[0.25], [0.75]]))
    assert measure_of(mu, AxisBox([0], [0.5])).value == 0.0
    assert measure_of(mu, AxisBox([0], [0.25])).value == 0.25
    zero = SignedMeasure.zero(2)
    assert measure_of(zero, Ball([0.5, 0.5], 0.3)).value == 0.0


def test_mass_balance_and_additivity():
    pts = gen_random(37, 2, 4)
    mu = SignedMeasure.qmc(pts)
    assert abs(measure_of(mu, FullCube(2)).value) < 1e-15
    a = AxisBox([0.0, 0.1], [0.5, 0.9])
    b = AxisBox([0.5, 0.1], [1.0, 0.9])
    ab = AxisBox([0.0, 0.1], [1.0, 0.9])
    # atoms on the shared face would be counted twice; the random set has none there
    assert not np.any(pts.points[:, 0] == 0.5)
    total = measure_of(mu, a).value + measure_of(mu, b).value
    assert total == pytest.approx(measure_of(mu, ab).value, abs=1e-15)


def test_periodized_measure_examples():
    mu = SignedMeasure.qmc(np.array([[0.5]]))
    assert periodized_measure(mu, FullCube(1), [0.75], [0.5]) == pytest.approx(0.5)
    assert periodized_measure(mu, FullCube(1), [0.25], [0.5]) == pytest.approx(-0.5)
    assert periodized_measure(SignedMeasure.zero(1), FullCube(1), [0.3], [0.2]) == 0.0


def test_periodized_measure_matches_wider_lattice_sum():
    pts = gen_halton(13, 2)
    mu = SignedMeasure.qmc(pts)
    rng = rng_from_seed(2)
    for _ in range(20):
        x, t = rng.random(2), rng.random(2)
        wide = 0.0
        for n in itertools.product(range(-2, 3), repeat=2):
            wide += measure_of(mu, clip(FullCube(2), AnchoredBox(t, x + np.array(n)))).value
        assert periodized_measure(mu, FullCube(2), x, t) == pytest.approx(wide, abs=1e-12)


def test_region_outside_cube_rejected():
    with pytest.raises(RegionError):
        periodized_measure(SignedMeasure.zero(2), Ball([0.9, 0.5], 0.3), [0.1, 0.1], [0.5, 0.5])


def test_sec4_simplex_guards_and_centroid():
    with pytest.raises(InvalidParameterError):
        sec4_simplex(1 / 3)
    tri = sec4_simplex(0.2)
    verts = tri.polygon
    assert len(verts) == 3
    assert tri.contains(np.mean(verts, axis=0))


def test_region_json():
    assert isinstance(region_from_json({"type": "box", "lo": [0, 0], "hi": [1, 1]}), AxisBox)
    assert isinstance(region_from_json({"type": "ball", "center": [0.5, 0.5], "r": 0.1}), Ball)
    assert isinstance(region_from_json({"type": "polytope", "normals": [[1, 1]], "offsets": [1]}), Polytope)
    assert isinstance(region_from_json({"type": "simplex-sec4", "eps": 0.1}), Polytope)
    with pytest.raises(InvalidParameterError):
        region_from_json({"type": "torus"})


@given(
    st.lists(st.floats(0, 0.999), min_size=2, max_size=2),
    st.lists(st.floats(0.001, 1), min_size=2, max_size=2),
)
def test_clip_membership_is_conjunction(x, t):
    tri = sec4_simplex(0.05)
    box = AnchoredBox(t, np.array(x) + 0.3)
    c = clip(tri, box)
    probes = rng_from_seed(0).random((200, 2)) * 1.2 - 0.1
    lo, hi = np.maximum(box.lo, 0), np.minimum(box.hi, 1)
    expect = tri.contains_many(probes) & np.all((probes >= lo) & (probes <= hi), axis=1)
    assert np.array_equal(c.contains_many(probes), expect)
    assert isinstance(c, (Clipped, Empty))
