"""Integrands on the torus: trigonometric polynomials and callbacks.

Provides mixed-partial variations, the 2δ − 2πi n Fourier multiplier in
coefficient and spatial form, Sobolev-type spectral norms, exact pairings
with signed measures, and quadrature errors on regions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidParameterError,
    UndefinedPairingError,
)
from .estimates import EXACT, MONTE_CARLO, QUADRATURE, ErrorEstimate
from .pointgen import PointSet, rng_from_seed
from .regions import (
    AxisBox,
    Ball,
    Clipped,
    Empty,
    FullCube,
    Polytope,
    VolumeConfig,
    _clip_polygon,
    sample_region,
)

TWO_PI = 2.0 * math.pi
_EVAL_CHUNK = 1 << 21


def multi_indices(d):
    """All alpha in {0,1}^d, as tuples, in lexicographic order."""
    return list(itertools.product((0, 1), repeat=d))


# ----------------------------------------------------------- TrigPoly


class TrigPoly:
    """f(x) = sum_n c_n exp(2 pi i n.x) with finitely many nonzero c_n."""

    def __init__(self, dim, coeffs):
        if dim < 1:
            raise InvalidParameterError("dim must be >= 1")
        merged = {}
        items = coeffs.items() if isinstance(coeffs, dict) else coeffs
        for n, c in items:
            key = tuple(int(v) for v in np.atleast_1d(n))
            if len(key) != dim:
                raise DimensionMismatchError(f"frequency {key} does not have {dim} entries")
            merged[key] = merged.get(key, 0.0) + complex(c)
        keys = sorted(k for k, v in merged.items() if v != 0)
        self.dim = dim
        self.freqs = np.array(keys, dtype=np.int64).reshape(-1, dim)
        self.amps = np.array([merged[k] for k in keys], dtype=complex)
        self.freqs.setflags(write=False)
        self.amps.setflags(write=False)
        if not np.all(np.isfinite(self.amps)):
            raise InvalidParameterError("coefficients must be finite")

    @classmethod
    def from_arrays(cls, freqs, amps):
        freqs = np.asarray(freqs, dtype=np.int64)
        return cls(freqs.shape[1], zip(map(tuple, freqs), amps))

    @classmethod
    def constant(cls, dim, value=1.0):
        return cls(dim, {(0,) * dim: value})

    def coeffs(self):
        return {tuple(int(v) for v in n): complex(c) for n, c in zip(self.freqs, self.amps)}

    def coeff(self, n):
        return self.coeffs().get(tuple(int(v) for v in n), 0j)

    @property
    def degree(self):
        return int(np.max(np.abs(self.freqs))) if len(self.amps) else 0

    def __len__(self):
        return len(self.amps)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        x = x.reshape(-1, self.dim)
        out = np.zeros(x.shape[0], dtype=complex)
        if len(self.amps):
            step = max(1, _EVAL_CHUNK // len(self.amps))
            f = self.freqs.astype(float)
            for s in range(0, x.shape[0], step):
                out[s : s + step] = np.exp(2j * np.pi * (x[s : s + step] @ f.T)) @ self.amps
        return out[0] if single else out

    def with_amps(self, amps):
        return TrigPoly.from_arrays(self.freqs, amps) if len(self.amps) else TrigPoly(self.dim, {})

    def __mul__(self, scalar):
        return self.with_amps(self.amps * complex(scalar))

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, TrigPoly) or other.dim != self.dim:
            return NotImplemented
        return TrigPoly(self.dim, list(self.coeffs().items()) + list(other.coeffs().items()))

    def partial(self, alpha):
        """Mixed partial derivative d^alpha f, exactly."""
        alpha = np.asarray(alpha, dtype=int)
        mult = np.prod((2j * np.pi * self.freqs) ** alpha, axis=1)
        return self.with_amps(self.amps * mult)

    def is_real(self, tol=1e-14):
        c = self.coeffs()
        return all(abs(v - np.conj(c.get(tuple(-k for k in n), 0j))) <= tol for n, v in c.items())

    def grid_values(self, m):
        """Values on the midpoint grid ((j + 1/2)/m)_j, shape (m,)*d."""
        d = self.dim
        if self.degree < m / 2:
            grid = np.zeros((m,) * d, dtype=complex)
            shift = np.exp(1j * np.pi * self.freqs.sum(axis=1) / m)
            np.add.at(grid, tuple((self.freqs % m).T), self.amps * shift)
            return np.fft.ifftn(grid) * m**d
        axes = [(np.arange(m) + 0.5) / m] * d
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
        return self(pts).reshape((m,) * d)

    def to_json(self):
        return {
            "dim": self.dim,
            "coeffs": [
                {"n": [int(v) for v in n], "re": float(c.real), "im": float(c.imag)}
                for n, c in zip(self.freqs, self.amps)
            ],
        }

    @classmethod
    def from_json(cls, obj):
        try:
            dim = int(obj["dim"])
            items = [(tuple(e["n"]), complex(e.get("re", 0.0), e.get("im", 0.0))) for e in obj["coeffs"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidParameterError(f"malformed trigonometric polynomial: {exc}") from None
        return cls(dim, items)

    def __repr__(self):
        return f"TrigPoly(dim={self.dim}, terms={len(self)}, degree={self.degree})"


def random_trig_poly(rng, dim, degree, terms=None):
    """Random coefficients on a random subset of {-degree..degree}^dim."""
    span = 2 * degree + 1
    total = span**dim
    k = total if terms is None else min(terms, total)
    idx = rng.choice(total, size=k, replace=False)
    freqs = np.array(np.unravel_index(idx, (span,) * dim)).T - degree
    amps = rng.normal(size=k) + 1j * rng.normal(size=k)
    return TrigPoly.from_arrays(freqs, amps)


# ---------------------------------------------------- callback functions


class CallbackFunction:
    """Integrand given by a vectorised callable f(X) with X of shape (M, d).

    ``partials`` maps alpha tuples in {0,1}^d to exact derivative callbacks;
    missing ones are approximated by central differences with step ``h``.
    Periodic functions are probed for 1-periodicity on construction; set
    ``periodic=False`` for integrands only meaningful on a region.
    """

    def __init__(self, dim, value, partials=None, h=1e-5, periodic=True, seed=0, name=None, domain=None):
        if dim < 1:
            raise InvalidParameterError("dim must be >= 1")
        if not h > 0:
            raise InvalidParameterError("finite-difference step must be positive")
        self.dim = dim
        self.value = value
        self.partials = dict(partials or {})
        self.h = float(h)
        self.periodic = periodic
        self.name = name
        self.domain = domain
        if periodic:
            self._check_periodic(seed)

    def _check_periodic(self, seed, probes=100, tol=1e-8):
        x = rng_from_seed(seed).random((probes, self.dim))
        base = np.asarray(self.value(x))
        for k in range(self.dim):
            y = x.copy()
            y[:, k] += 1.0
            gap = np.max(np.abs(np.asarray(self.value(y)) - base))
            if gap > tol * max(1.0, float(np.max(np.abs(base)))):
                raise InvalidParameterError(
                    f"callback is not 1-periodic in coordinate {k} (gap {gap:.3g})"
                )

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return self.value(x.reshape(1, -1))[0]
        return self.value(x)

    def partial_values(self, alpha, x):
        alpha = tuple(int(a) for a in alpha)
        x = np.asarray(x, dtype=float).reshape(-1, self.dim)
        if not any(alpha):
            return np.asarray(self.value(x))
        if alpha in self.partials:
            return np.asarray(self.partials[alpha](x))
        axes = [k for k in range(self.dim) if alpha[k]]
        total = 0.0
        for signs in itertools.product((-1.0, 1.0), repeat=len(axes)):
            y = x.copy()
            for k, s in zip(axes, signs):
                y[:, k] += s * self.h
            total = total + np.prod(signs) * np.asarray(self.value(y))
        return total / (2.0 * self.h) ** len(axes)

    def __repr__(self):
        return f"CallbackFunction(dim={self.dim}, name={self.name!r})"


def callback_from_trig(poly, h=1e-5, exact_partials=False):
    partials = None
    if exact_partials:
        partials = {a: poly.partial(a) for a in multi_indices(poly.dim) if any(a)}
    return CallbackFunction(poly.dim, poly, partials, h=h)


# ------------------------------------------------------------ variation


@dataclass(frozen=True)
class GridConfig:
    points: int = 128

    def __post_init__(self):
        if self.points < 1:
            raise InvalidParameterError("grid needs at least one point per axis")


def midpoint_grid(d, m):
    axes = [(np.arange(m) + 0.5) / m] * d
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)


def _lp_norm(values, p):
    a = np.abs(np.asarray(values)).reshape(-1)
    if p == math.inf:
        return float(a.max())
    return float(np.mean(a**p) ** (1.0 / p))


def _check_p(p):
    p = float(p)
    if not p >= 1.0:
        raise InvalidParameterError(f"p must satisfy 1 <= p <= inf, got {p}")
    return p


def variation_p(f, p, grid=None):
    """sum over alpha in {0,1}^d of 2^(d-|alpha|) * ||d^alpha f||_p on the torus.

    Exact (Parseval) for trigonometric polynomials with p = 2; midpoint-grid
    quadrature otherwise. For p = inf the grid maximum is a lower bound.
    """
    p = _check_p(p)
    grid = grid or GridConfig()
    d = f.dim
    total = 0.0
    pts = None
    for alpha in multi_indices(d):
        w = 2.0 ** (d - sum(alpha))
        if isinstance(f, TrigPoly):
            g = f.partial(alpha)
            if p == 2.0:
                norm = math.sqrt(math.fsum(np.abs(g.amps) ** 2))
            else:
                norm = _lp_norm(g.grid_values(grid.points), p)
        else:
            if getattr(f, "periodic", True) is False:
                raise UndefinedPairingError(
                    "the torus variation needs a periodic integrand; use variation_on_region"
                )
            if pts is None:
                pts = midpoint_grid(d, grid.points)
            norm = _lp_norm(f.partial_values(alpha, pts), p)
        total += w * norm
    return total


# ------------------------------------------------------- dual operator


def d_multiplier(freqs):
    """prod_k (2 delta(n_k) - 2 pi i n_k) for each row of freqs."""
    n = np.asarray(freqs, dtype=float)
    return np.prod(np.where(n == 0, 2.0, 0.0) - 2j * np.pi * n, axis=1)


def apply_D_fourier(f):
    return f.with_amps(f.amps * d_multiplier(f.freqs))


def apply_D_spatial(f, x, grid=None):
    """Alternating sum of partially averaged mixed partials at x.

    For each split alpha + beta = (1,...,1): (-1)^|alpha| 2^|beta| times the
    average over the beta-coordinates of d^alpha f. Exact coefficient filter
    for TrigPoly; midpoint rule with ``grid.points`` nodes per averaged axis
    for callbacks (spectrally accurate on periodic integrands). ``x`` is one
    point or an (M, d) batch.
    """
    d = f.dim
    arr = np.asarray(x, dtype=float)
    single = arr.ndim <= 1
    xs = arr.reshape(-1, d)
    m = xs.shape[0]
    grid = grid or GridConfig(64)
    total = np.zeros(m, dtype=complex)
    for alpha in multi_indices(d):
        beta = [1 - a for a in alpha]
        sign = (-1.0) ** sum(alpha) * 2.0 ** sum(beta)
        if isinstance(f, TrigPoly):
            g = f.partial(alpha)
            keep = np.all(g.freqs[:, np.array(beta, bool)] == 0, axis=1)
            if keep.any():
                phase = np.exp(2j * np.pi * (xs @ g.freqs[keep].T))
                total += sign * (phase @ g.amps[keep])
            continue
        avg_axes = [k for k in range(d) if beta[k]]
        if avg_axes:
            nodes = midpoint_grid(len(avg_axes), grid.points)
            pts = np.repeat(xs, nodes.shape[0], axis=0)
            pts[:, avg_axes] = np.tile(nodes, (m, 1))
            vals = np.asarray(f.partial_values(alpha, pts)).reshape(m, nodes.shape[0]).mean(axis=1)
        else:
            vals = np.asarray(f.partial_values(alpha, xs))
        total += sign * vals
    return complex(total[0]) if single else total


# ----------------------------------------------------- spectral norms


@dataclass(frozen=True)
class SpectralNorm:
    kind: str  # "product", "radial" or "zonal"
    gamma: float

    def __post_init__(self):
        if self.kind not in ("product", "radial", "zonal"):
            raise InvalidParameterError(f"unknown spectral norm kind {self.kind!r}")
        if not self.gamma > 0:
            raise InvalidParameterError("gamma must be positive")


def spectral_weights(freqs, norm):
    """Weight multiplying |f_hat(n)|^2 in the squared norm."""
    n = np.asarray(freqs, dtype=float)
    if norm.kind == "product":
        return np.prod((1.0 + np.abs(n)) ** (2.0 * norm.gamma), axis=1)
    return (1.0 + np.sum(n * n, axis=1)) ** norm.gamma


def spectral_norm(f, norm):
    """{sum_n w(n) |f_hat(n)|^2}^(1/2).

    Zonal norms apply to zonal expansions (objects with a 1-D ``coeffs``
    array in the (2n+1) P_n basis); the degree-n energy is c_n^2 (2n+1).
    """
    if norm.kind == "zonal":
        c = np.asarray(f.coeffs, dtype=float)
        n = np.arange(c.shape[0], dtype=float)
        return math.sqrt(math.fsum((1.0 + n * n) ** norm.gamma * c * c * (2 * n + 1)))
    if len(f.amps) == 0:
        return 0.0
    return math.sqrt(math.fsum(spectral_weights(f.freqs, norm) * np.abs(f.amps) ** 2))


def pair(f, mu):
    """sum_n f_hat(n) * conj(mu_hat(n)), the integral of f against conj(mu)."""
    if f.dim != mu.dim:
        raise DimensionMismatchError("integrand and measure dimensions differ")
    if len(f.amps) == 0:
        return 0j
    return complex(np.sum(f.amps * np.conj(mu.fourier(f.freqs))))


# --------------------------------------------------------- quadrature


@dataclass(frozen=True)
class QuadratureConfig:
    """Rules for integrals over regions.

    ``order`` Gauss points per axis; ``levels`` uniform 4-way refinements of
    each triangle for polygons; Monte Carlo budget for other regions.
    """

    order: int = 16
    levels: int = 4
    samples: int = 1 << 18
    seed: int = 0


def _gauss01(m):
    x, w = np.polynomial.legendre.leggauss(m)
    return 0.5 * (x + 1.0), 0.5 * w


def _refine(tris):
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
    return np.concatenate(
        [np.stack(t, axis=1) for t in ((a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca))]
    )


def triangle_rule(tris, order):
    """Collapsed (Duffy) Gauss rule on a batch of triangles (T, 3, 2)."""
    u, wu = _gauss01(order)
    U, V = np.meshgrid(u, u, indexing="ij")
    W = np.outer(wu, wu) * U
    U, V, W = U.ravel(), V.ravel(), W.ravel()
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    e1, e2 = b - a, c - b
    jac = np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    pts = a[:, None, :] + U[None, :, None] * e1[:, None, :] + (U * V)[None, :, None] * e2[:, None, :]
    return pts.reshape(-1, 2), (jac[:, None] * W[None, :]).ravel()


def polygon_rule(poly, order, levels):
    if len(poly) < 3:
        return np.zeros((0, 2)), np.zeros(0)
    tris = np.array([[poly[0], poly[i], poly[i + 1]] for i in range(1, len(poly) - 1)])
    for _ in range(levels):
        tris = _refine(tris)
    return triangle_rule(tris, order)


def box_rule(lo, hi, order):
    u, w = _gauss01(order)
    d = lo.shape[0]
    axes = [lo[k] + (hi[k] - lo[k]) * u for k in range(d)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    wts = np.ones(1)
    for k in range(d):
        wts = np.outer(wts, w * (hi[k] - lo[k])).ravel()
    return pts, wts


def disc_rule(center, radius, order):
    u, w = _gauss01(order)
    m = 2 * order
    theta = 2.0 * np.pi * np.arange(m) / m
    R, T = np.meshgrid(radius * u, theta, indexing="ij")
    pts = np.stack((center[0] + R * np.cos(T), center[1] + R * np.sin(T)), axis=-1).reshape(-1, 2)
    wts = np.outer(w * radius * radius * u, np.full(m, 2.0 * np.pi / m)).ravel()
    return pts, wts


def region_rule(region, cfg):
    """Deterministic quadrature nodes and weights, or None if no rule applies."""
    d = region.dim
    if isinstance(region, Empty):
        return np.zeros((0, d)), np.zeros(0)
    if isinstance(region, (FullCube, AxisBox)) or d == 1:
        # convex sets in one dimension coincide with their bounding interval
        lo, hi = region.bbox()
        if np.any(hi <= lo):
            return np.zeros((0, d)), np.zeros(0)
        return box_rule(lo, hi, cfg.order)
    if d != 2:
        return None
    if isinstance(region, Polytope):
        return polygon_rule(region.polygon, cfg.order, cfg.levels)
    if isinstance(region, Clipped) and isinstance(region.base, Polytope):
        poly = region.base.polygon
        lo, hi = region.box.bbox()
        for a, b, c in ((-1, 0, -lo[0]), (1, 0, hi[0]), (0, -1, -lo[1]), (0, 1, hi[1])):
            poly = _clip_polygon(poly, a, b, c)
        return polygon_rule(poly, cfg.order, cfg.levels)
    if isinstance(region, Ball) and region.inside_unit_cube():
        return disc_rule(region.center, region.radius, 4 * cfg.order)
    return None


def _values(f, pts):
    return np.asarray(f(pts)) if len(pts) else np.zeros(0)


def _trig_box_integral(f, lo, hi):
    n = f.freqs.astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        per_axis = np.where(
            n == 0,
            hi - lo,
            (np.exp(2j * np.pi * n * hi) - np.exp(2j * np.pi * n * lo)) / (2j * np.pi * n),
        )
    return complex(np.sum(f.amps * np.prod(per_axis, axis=1)))


def integrate(f, region, cfg=None):
    """(integral of f over region, stderr, method)."""
    cfg = cfg or QuadratureConfig()
    if isinstance(f, TrigPoly) and isinstance(region, (FullCube, AxisBox, Empty)):
        if isinstance(region, Empty):
            return 0j, 0.0, EXACT
        lo, hi = region.bbox()
        return _trig_box_integral(f, lo, hi), 0.0, EXACT
    rule = region_rule(region, cfg)
    if rule is not None:
        pts, wts = rule
        return complex(np.dot(_values(f, pts), wts)), 0.0, QUADRATURE
    inside, cell = sample_region(region, VolumeConfig(cfg.samples, cfg.seed, "monte-carlo"))
    vals = np.zeros(cfg.samples, dtype=complex)
    vals[: inside.shape[0]] = _values(f, inside)
    lo, hi = region.bbox()
    box_vol = float(np.prod(hi - lo))
    mean = vals.mean()
    stderr = box_vol * float(np.std(vals, ddof=1)) / math.sqrt(cfg.samples) if cfg.samples > 1 else 0.0
    return complex(mean * box_vol), stderr, MONTE_CARLO


def qmc_error(f, omega, pts, cfg=None):
    """|N^-1 sum_j (f chi_omega)(x_j) - integral over omega of f|."""
    if isinstance(pts, PointSet):
        x = pts.points
    else:
        x = np.asarray(pts, dtype=float)
    if x.shape[1] != f.dim or omega.dim != f.dim:
        raise DimensionMismatchError("integrand, region and points must share a dimension")
    if hasattr(f, "check_region"):
        f.check_region(omega)
    inside = omega.contains_many(x)
    node_avg = complex(np.sum(_values(f, x[inside]))) / x.shape[0]
    integral, stderr, method = integrate(f, omega, cfg)
    return ErrorEstimate(abs(node_avg - integral), stderr, method, integral, node_avg)


def variation_on_region(f, omega, p=1.0, cfg=None):
    """sum_alpha 2^(d-|alpha|) ||d^alpha f||_{L^p(omega)}; returns (value, stderr, method)."""
    p = _check_p(p)
    cfg = cfg or QuadratureConfig()
    d = f.dim
    if hasattr(f, "check_region"):
        f.check_region(omega)
    rule = region_rule(omega, cfg)
    if rule is not None:
        pts, wts = rule
        method, cell = QUADRATURE, None
    else:
        pts, cell = sample_region(omega, VolumeConfig(cfg.samples, cfg.seed, "monte-carlo"))
        method = MONTE_CARLO
    total = 0.0
    var = 0.0
    for alpha in multi_indices(d):
        w = 2.0 ** (d - sum(alpha))
        if isinstance(f, TrigPoly):
            a = np.abs(f.partial(alpha)(pts)) if len(pts) else np.zeros(0)
        else:
            a = np.abs(f.partial_values(alpha, pts)) if len(pts) else np.zeros(0)
        if p == math.inf:
            total += w * (float(a.max()) if a.size else 0.0)
            continue
        if rule is not None:
            total += w * float(np.dot(a**p, wts)) ** (1.0 / p)
            continue
        full = np.zeros(cfg.samples)
        full[: a.size] = a**p
        integral = float(full.mean()) * cell * cfg.samples
        se = float(full.std(ddof=1)) * cell * math.sqrt(cfg.samples) if cfg.samples > 1 else 0.0
        norm = integral ** (1.0 / p) if integral > 0 else 0.0
        # delta method for the p-th root
        dnorm = norm / (p * integral) * se if integral > 0 else 0.0
        total += w * norm
        var += (w * dnorm) ** 2
    return total, math.sqrt(var), method
