"""Closed regions in the unit cube and signed measures evaluated on them.

Every region answers three questions: does it contain a point, what is its
bounding box inside [0,1]^d, and (when a closed form exists) what is the
volume of its intersection with a batch of axis boxes. Regions without an
exact area oracle fall back to Monte Carlo sampling.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _accel
from .errors import DimensionMismatchError, InvalidParameterError, RegionError
from .estimates import EXACT, MONTE_CARLO, VolumeEstimate
from .pointgen import PointSet, rng_from_seed

_MC_CHUNK = 1 << 18
_CUBE_TOL = 1e-12


def _vec(x, name="x"):
    a = np.asarray(x, dtype=float).reshape(-1)
    if not np.all(np.isfinite(a)):
        raise InvalidParameterError(f"{name} must be finite")
    return a


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def ball_volume(d, r):
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0) * r**d


def _box_overlap(lo, hi, blo, bhi):
    """Volumes of [lo_i, hi_i] ∩ [blo, bhi] for a batch of boxes."""
    lengths = np.minimum(hi, bhi) - np.maximum(lo, blo)
    return np.prod(np.maximum(lengths, 0.0), axis=1)


class Region:
    """Base class; subclasses are frozen dataclasses."""

    dim: int

    def contains(self, x):
        x = _vec(x)
        if x.shape[0] != self.dim:
            raise DimensionMismatchError(f"point has {x.shape[0]} coordinates, region dim={self.dim}")
        return bool(self.contains_many(x[None, :])[0])

    def contains_many(self, pts):
        raise NotImplementedError

    def bbox(self):
        """Bounding box of the region intersected with the unit cube."""
        raise NotImplementedError

    def box_areas(self, lo, hi):
        """Exact volumes of region ∩ [lo_i, hi_i], or None if unavailable."""
        return None

    def exact_volume(self):
        d = self.dim
        areas = self.box_areas(np.zeros((1, d)), np.ones((1, d)))
        return None if areas is None else float(areas[0])

    def inside_unit_cube(self):
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError

    def _check_dim(self, pts):
        pts = np.asarray(pts, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise DimensionMismatchError(f"points must have shape (M, {self.dim})")
        return pts


@dataclass(frozen=True)
class Empty(Region):
    dim: int

    def contains_many(self, pts):
        pts = self._check_dim(pts)
        return np.zeros(pts.shape[0], dtype=bool)

    def bbox(self):
        return np.zeros(self.dim), np.zeros(self.dim)

    def box_areas(self, lo, hi):
        return np.zeros(np.asarray(lo).shape[0])

    def inside_unit_cube(self):
        return True

    def to_json(self):
        return {"type": "empty", "dim": self.dim}


@dataclass(frozen=True)
class FullCube(Region):
    dim: int

    def contains_many(self, pts):
        pts = self._check_dim(pts)
        return np.all((pts >= 0.0) & (pts <= 1.0), axis=1)

    def bbox(self):
        return np.zeros(self.dim), np.ones(self.dim)

    def box_areas(self, lo, hi):
        d = self.dim
        return _box_overlap(np.asarray(lo, float), np.asarray(hi, float), np.zeros(d), np.ones(d))

    def inside_unit_cube(self):
        return True

    def to_json(self):
        return {"type": "full", "dim": self.dim}


@dataclass(frozen=True, eq=False)
class AxisBox(Region):
    lo: np.ndarray
    hi: np.ndarray

    def __init__(self, lo, hi):
        lo, hi = _vec(lo, "lo"), _vec(hi, "hi")
        if lo.shape != hi.shape or lo.size == 0:
            raise DimensionMismatchError("lo and hi must have the same positive length")
        if np.any(lo > hi):
            raise InvalidParameterError("AxisBox needs lo <= hi in every coordinate")
        object.__setattr__(self, "lo", _frozen(lo))
        object.__setattr__(self, "hi", _frozen(hi))

    def __eq__(self, other):
        return (
            isinstance(other, AxisBox)
            and np.array_equal(self.lo, other.lo)
            and np.array_equal(self.hi, other.hi)
        )

    __hash__ = None

    @property
    def dim(self):
        return self.lo.shape[0]

    def contains_many(self, pts):
        pts = self._check_dim(pts)
        return np.all((pts >= self.lo) & (pts <= self.hi), axis=1)

    def bbox(self):
        return np.clip(self.lo, 0.0, 1.0), np.clip(self.hi, 0.0, 1.0)

    def box_areas(self, lo, hi):
        blo, bhi = self.bbox()
        return _box_overlap(np.asarray(lo, float), np.asarray(hi, float), blo, bhi)

    def inside_unit_cube(self):
        return bool(np.all(self.lo >= 0.0) and np.all(self.hi <= 1.0))

    def to_json(self):
        return {"type": "box", "lo": self.lo.tolist(), "hi": self.hi.tolist()}


@dataclass(frozen=True, eq=False)
class Ball(Region):
    """Closed Euclidean ball. Exact area oracles exist for d <= 2."""

    center: np.ndarray
    radius: float

    def __init__(self, center, radius):
        c = _vec(center, "center")
        r = float(radius)
        if not (math.isfinite(r) and r >= 0.0):
            raise InvalidParameterError("ball radius must be finite and >= 0")
        object.__setattr__(self, "center", _frozen(c))
        object.__setattr__(self, "radius", r)

    def __eq__(self, other):
        return (
            isinstance(other, Ball)
            and np.array_equal(self.center, other.center)
            and self.radius == other.radius
        )

    __hash__ = None

    @property
    def dim(self):
        return self.center.shape[0]

    def contains_many(self, pts):
        pts = self._check_dim(pts)
        diff = pts - self.center
        return np.einsum("ij,ij->i", diff, diff) <= self.radius * self.radius

    def bbox(self):
        return (
            np.clip(self.center - self.radius, 0.0, 1.0),
            np.clip(self.center + self.radius, 0.0, 1.0),
        )

    def box_areas(self, lo, hi):
        lo = np.asarray(lo, float)
        hi = np.asarray(hi, float)
        blo, bhi = self.bbox()
        lo = np.maximum(lo, blo)
        hi = np.minimum(hi, bhi)
        if self.dim == 1:
            return np.maximum(hi[:, 0] - lo[:, 0], 0.0)
        if self.dim == 2:
            cx, cy = self.center
            return _accel.disc_box_areas(float(cx), float(cy), self.radius, lo, hi)
        return None

    def exact_volume(self):
        if self.inside_unit_cube():
            return ball_volume(self.dim, self.radius)
        return super().exact_volume()

    def inside_unit_cube(self):
        return bool(
            np.all(self.center - self.radius >= 0.0) and np.all(self.center + self.radius <= 1.0)
        )

    def to_json(self):
        return {"type": "ball", "center": self.center.tolist(), "r": self.radius}


def _clip_polygon(poly, a, b, c):
    """Keep the part of a convex polygon where a*x + b*y <= c."""
    if len(poly) == 0:
        return poly
    s = poly @ np.array([a, b]) - c
    out = []
    for i in range(len(poly)):
        j = (i + 1) % len(poly)
        if s[i] <= 0.0:
            out.append(poly[i])
        if (s[i] < 0.0 < s[j]) or (s[i] > 0.0 > s[j]):
            out.append(poly[i] + s[i] / (s[i] - s[j]) * (poly[j] - poly[i]))
    return np.array(out, dtype=float).reshape(-1, 2)


def polygon_area(poly):
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))


@dataclass(frozen=True, eq=False)
class Polytope(Region):
    """Closed polyhedron {x : normals[i] . x <= offsets[i] for all i}."""

    normals: np.ndarray
    offsets: np.ndarray

    def __init__(self, normals, offsets):
        n = np.asarray(normals, dtype=float)
        c = _vec(offsets, "offsets")
        if n.ndim != 2 or n.shape[0] != c.shape[0] or n.shape[0] == 0:
            raise DimensionMismatchError("need one offset per normal and at least one constraint")
        if not np.all(np.isfinite(n)):
            raise InvalidParameterError("normals must be finite")
        object.__setattr__(self, "normals", _frozen(n))
        object.__setattr__(self, "offsets", _frozen(c))

    def __eq__(self, other):
        return (
            isinstance(other, Polytope)
            and np.array_equal(self.normals, other.normals)
            and np.array_equal(self.offsets, other.offsets)
        )

    __hash__ = None

    @property
    def dim(self):
        return self.normals.shape[1]

    def contains_many(self, pts):
        pts = self._check_dim(pts)
        return np.all(pts @ self.normals.T <= self.offsets, axis=1)

    @cached_property
    def _vertices(self):
        # vertices of the polytope intersected with the box [-1, 2]^d
        d = self.dim
        eye = np.eye(d)
        rows = list(self.normals) + [e for e in eye] + [-e for e in eye]
        rhs = list(self.offsets) + [2.0] * d + [1.0] * d
        A, b = np.array(rows), np.array(rhs)
        verts = []
        for idx in itertools.combinations(range(len(rows)), d):
            sub = A[list(idx)]
            if abs(np.linalg.det(sub)) < 1e-14:
                continue
            v = np.linalg.solve(sub, b[list(idx)])
            if np.all(A @ v <= b + 1e-9):
                verts.append(v)
        return np.array(verts).reshape(-1, d)

    @cached_property
    def polygon(self):
        """Vertices of the polytope ∩ unit square (d = 2 only), counter-clockwise."""
        if self.dim != 2:
            raise InvalidParameterError("polygon is only defined for d = 2")
        poly = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        for (a, b), c in zip(self.normals, self.offsets):
            poly = _clip_polygon(poly, a, b, c)
        return poly

    def bbox(self):
        v = self._vertices
        if v.shape[0] == 0:
            return np.zeros(self.dim), np.zeros(self.dim)
        return np.clip(v.min(axis=0), 0.0, 1.0), np.clip(v.max(axis=0), 0.0, 1.0)

    def box_areas(self, lo, hi):
        lo = np.asarray(lo, float)
        hi = np.asarray(hi, float)
        if self.dim == 1:
            v = self._vertices[:, 0]
            if v.size == 0:
                return np.zeros(lo.shape[0])
            a, b = max(v.min(), 0.0), min(v.max(), 1.0)
            return np.maximum(np.minimum(hi[:, 0], b) - np.maximum(lo[:, 0], a), 0.0)
        if self.dim == 2:
            poly = self.polygon
            if len(poly) < 3:
                return np.zeros(lo.shape[0])
            return _accel.polygon_box_areas(np.ascontiguousarray(poly), lo, hi)
        return None

    def inside_unit_cube(self):
        v = self._vertices
        return bool(v.shape[0] == 0 or (np.all(v >= -_CUBE_TOL) and np.all(v <= 1.0 + _CUBE_TOL)))

    def to_json(self):
        return {"type": "polytope", "normals": self.normals.tolist(), "offsets": self.offsets.tolist()}


@dataclass(frozen=True, eq=False)
class Clipped(Region):
    """A region intersected with a closed axis box."""

    base: Region
    box: AxisBox

    @property
    def dim(self):
        return self.base.dim

    def contains_many(self, pts):
        return self.base.contains_many(pts) & self.box.contains_many(pts)

    def bbox(self):
        lo, hi = self.base.bbox()
        blo, bhi = self.box.bbox()
        return np.maximum(lo, blo), np.minimum(hi, bhi)

    def box_areas(self, lo, hi):
        blo, bhi = self.box.bbox()
        return self.base.box_areas(np.maximum(lo, blo), np.minimum(hi, bhi))

    def inside_unit_cube(self):
        return self.base.inside_unit_cube() or self.box.inside_unit_cube()

    def to_json(self):
        return {"type": "clipped", "base": self.base.to_json(), "box": self.box.to_json()}

    def __eq__(self, other):
        return isinstance(other, Clipped) and self.base == other.base and self.box == other.box

    __hash__ = None


@dataclass(frozen=True, eq=False)
class AnchoredBox:
    """The closed box [shift - t, shift]; with shift = x + n it is x + n - I(t)."""

    t: np.ndarray
    shift: np.ndarray

    def __init__(self, t, shift):
        t, s = _vec(t, "t"), _vec(shift, "shift")
        if t.shape != s.shape:
            raise DimensionMismatchError("t and shift must have the same length")
        if np.any(t < 0.0) or np.any(t > 1.0):
            raise InvalidParameterError("t must lie in [0, 1]^d")
        object.__setattr__(self, "t", _frozen(t))
        object.__setattr__(self, "shift", _frozen(s))

    @property
    def dim(self):
        return self.t.shape[0]

    @property
    def lo(self):
        return self.shift - self.t

    @property
    def hi(self):
        return self.shift


def sec4_simplex(eps, d=2):
    """{x_1 >= x_2 >= ... >= x_d >= eps, 1 - x_1 - ... - x_d >= eps}."""
    eps = float(eps)
    if not (0.0 < eps < 1.0 / (d + 1)):
        raise InvalidParameterError(f"eps must lie in (0, 1/(d+1)) for a non-empty simplex, got {eps}")
    normals, offsets = [], []
    for k in range(d - 1):
        row = np.zeros(d)
        row[k + 1], row[k] = 1.0, -1.0
        normals.append(row)
        offsets.append(0.0)
    row = np.zeros(d)
    row[d - 1] = -1.0
    normals.append(row)
    offsets.append(-eps)
    normals.append(np.ones(d))
    offsets.append(1.0 - eps)
    return Polytope(normals, offsets)


def clip(region, box):
    """Intersect a region with an AxisBox or AnchoredBox (and the unit cube)."""
    d = region.dim
    if box.dim != d:
        raise DimensionMismatchError("box and region dimensions differ")
    lo = np.maximum(np.asarray(box.lo, float), 0.0)
    hi = np.minimum(np.asarray(box.hi, float), 1.0)
    if isinstance(region, Empty) or np.any(lo > hi):
        return Empty(d)
    if isinstance(region, FullCube):
        return AxisBox(lo, hi)
    if isinstance(region, AxisBox):
        lo2 = np.maximum(lo, region.lo)
        hi2 = np.minimum(hi, region.hi)
        return Empty(d) if np.any(lo2 > hi2) else AxisBox(lo2, hi2)
    if isinstance(region, Clipped):
        return clip(region.base, AxisBox(np.maximum(lo, region.box.lo), np.minimum(hi, region.box.hi)))
    rlo, rhi = region.bbox()
    if np.any(np.maximum(lo, rlo) > np.minimum(hi, rhi)):
        return Empty(d)
    return Clipped(region, AxisBox(lo, hi))


def require_in_unit_cube(region):
    if not region.inside_unit_cube():
        raise RegionError("the region must lie inside [0,1]^d")


# --------------------------------------------------------------- volumes


@dataclass(frozen=True)
class VolumeConfig:
    samples: int = 1 << 16
    seed: int = 0
    method: str = "auto"  # "auto" uses exact oracles when available

    def __post_init__(self):
        if self.samples < 1:
            raise InvalidParameterError("samples must be >= 1")
        if self.method not in ("auto", MONTE_CARLO):
            raise InvalidParameterError(f"unknown volume method {self.method!r}")


def sample_region(region, cfg):
    """Uniform samples of the bounding box that fall inside the region.

    Returns ``(points, cell)`` where ``cell`` is the bounding-box volume
    divided by ``cfg.samples``: each returned point carries that much volume.
    """
    lo, hi = region.bbox()
    d = region.dim
    width = hi - lo
    if np.any(width <= 0.0):
        return np.zeros((0, d)), 0.0
    rng = rng_from_seed(cfg.seed)
    kept = []
    left = cfg.samples
    while left > 0:
        m = min(left, _MC_CHUNK)
        u = lo + width * rng.random((m, d))
        kept.append(u[region.contains_many(u)])
        left -= m
    return np.concatenate(kept), float(np.prod(width)) / cfg.samples


def volume(region, cfg=None):
    """Volume of region ∩ [0,1]^d, exact when a closed form is available."""
    cfg = cfg or VolumeConfig()
    if cfg.method == "auto":
        v = region.exact_volume()
        if v is not None:
            return VolumeEstimate(float(v), 0.0, EXACT)
    lo, hi = region.bbox()
    box_vol = float(np.prod(np.maximum(hi - lo, 0.0)))
    if box_vol == 0.0:
        return VolumeEstimate(0.0, 0.0, EXACT)
    inside, cell = sample_region(region, cfg)
    m = cfg.samples
    k = inside.shape[0]
    p = k / m
    # smoothed proportion keeps the reported error positive when k is 0 or m
    ps = (k + 0.5) / (m + 1.0)
    stderr = box_vol * math.sqrt(ps * (1.0 - ps) / m)
    return VolumeEstimate(box_vol * p, stderr, MONTE_CARLO, samples=m, seed=cfg.seed)


# -------------------------------------------------------- signed measures


@dataclass(frozen=True, eq=False)
class SignedMeasure:
    """sum_p w_p delta_p - uniform_coeff * dx on [0,1]^d."""

    atoms: np.ndarray
    weights: np.ndarray
    uniform_coeff: float

    def __init__(self, atoms, weights, uniform_coeff=0.0, dim=None):
        a = np.asarray(atoms, dtype=float)
        if a.size == 0:
            if dim is None:
                raise InvalidParameterError("dim is required for a measure without atoms")
            a = np.zeros((0, dim))
        elif a.ndim == 1:
            a = a.reshape(-1, 1) if dim in (None, 1) else a.reshape(-1, dim)
        w = np.asarray(weights, dtype=float).reshape(-1)
        if w.shape[0] != a.shape[0]:
            raise DimensionMismatchError("one weight per atom is required")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(w)) and math.isfinite(uniform_coeff)):
            raise InvalidParameterError("measure data must be finite")
        object.__setattr__(self, "atoms", _frozen(a))
        object.__setattr__(self, "weights", _frozen(w))
        object.__setattr__(self, "uniform_coeff", float(uniform_coeff))

    @property
    def dim(self):
        return self.atoms.shape[1]

    @classmethod
    def qmc(cls, pts):
        p = pts.points if isinstance(pts, PointSet) else np.asarray(pts, float)
        n = p.shape[0]
        return cls(p, np.full(n, 1.0 / n), 1.0)

    @classmethod
    def zero(cls, dim):
        return cls(np.zeros((0, dim)), np.zeros(0), 0.0, dim=dim)

    @classmethod
    def uniform_only(cls, dim, coeff=1.0):
        return cls(np.zeros((0, dim)), np.zeros(0), coeff, dim=dim)

    def scaled(self, factor):
        return SignedMeasure(self.atoms, self.weights * factor, self.uniform_coeff * factor, dim=self.dim)

    def total_mass(self):
        return math.fsum(self.weights) - self.uniform_coeff

    def fourier(self, freqs):
        """mu_hat(n) = sum_p w_p exp(-2 pi i n.p) - uniform_coeff * [n = 0]."""
        freqs = np.asarray(freqs, dtype=float).reshape(-1, self.dim)
        phase = np.exp(-2j * np.pi * (freqs @ self.atoms.T))
        out = phase @ self.weights
        out[np.all(freqs == 0, axis=1)] -= self.uniform_coeff
        return out


def measure_of(mu, region, cfg=None):
    if mu.dim != region.dim:
        raise DimensionMismatchError("measure and region dimensions differ")
    inside = region.contains_many(mu.atoms)
    atoms = math.fsum(mu.weights[inside])
    if mu.uniform_coeff == 0.0:
        return VolumeEstimate(atoms, 0.0, EXACT)
    vol = volume(region, cfg)
    return VolumeEstimate(
        atoms - mu.uniform_coeff * vol.value,
        abs(mu.uniform_coeff) * vol.stderr,
        vol.method,
        vol.samples,
        vol.seed,
    )


def lattice_shifts(d):
    return np.array(list(itertools.product((-1.0, 0.0, 1.0), repeat=d)))


def periodized_measure(mu, omega, x, t, cfg=None):
    """sum over n in Z^d of mu((x + n - I(t)) ∩ omega); only |n_k| <= 1 can contribute."""
    require_in_unit_cube(omega)
    x, t = _vec(x), _vec(t, "t")
    total = 0.0
    for n in lattice_shifts(omega.dim):
        total += measure_of(mu, clip(omega, AnchoredBox(t, x + n)), cfg).value
    return total


def restrict(mu, omega):
    """Atoms of mu lying in omega, with their weights."""
    inside = omega.contains_many(mu.atoms)
    return mu.atoms[inside], mu.weights[inside]


class UniformPart:
    """Lebesgue measure on a region, evaluated on batches of boxes.

    Uses the region's exact area oracle when it has one; otherwise the
    measure is replaced by Monte Carlo atoms carrying equal volume.
    """

    def __init__(self, region, cfg=None):
        self.region = region
        self.cfg = cfg or VolumeConfig()
        probe = region.box_areas(np.zeros((1, region.dim)), np.ones((1, region.dim)))
        self.exact = probe is not None and self.cfg.method == "auto"
        if self.exact:
            self.atoms = np.zeros((0, region.dim))
            self.cell = 0.0
            self.stderr_scale = 0.0
        else:
            self.atoms, self.cell = sample_region(region, self.cfg)
            lo, hi = region.bbox()
            self.stderr_scale = float(np.prod(np.maximum(hi - lo, 0.0))) / math.sqrt(self.cfg.samples)

    def box_areas(self, lo, hi):
        if self.exact:
            return self.region.box_areas(lo, hi)
        return _accel.box_sums(lo, hi, self.atoms, np.full(self.atoms.shape[0], self.cell))

    @property
    def method(self):
        return EXACT if self.exact else MONTE_CARLO


# ------------------------------------------------------------- JSON I/O


def region_from_json(obj, dim=None):
    if not isinstance(obj, dict) or "type" not in obj:
        raise InvalidParameterError("a region literal is an object with a 'type' field")
    kind = obj["type"]
    if kind == "box":
        return AxisBox(obj["lo"], obj["hi"])
    if kind == "ball":
        return Ball(obj["center"], obj["r"])
    if kind == "polytope":
        return Polytope(obj["normals"], obj["offsets"])
    if kind == "simplex-sec4":
        return sec4_simplex(obj["eps"], int(obj.get("dim", dim or 2)))
    if kind == "full":
        return FullCube(int(obj.get("dim", dim or 2)))
    if kind == "empty":
        return Empty(int(obj.get("dim", dim or 2)))
    raise InvalidParameterError(f"unknown region type {kind!r}")
