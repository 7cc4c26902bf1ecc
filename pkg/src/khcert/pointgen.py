"""Quadrature node sets on the torus [0,1)^d and on the unit sphere.

All generators are pure functions of their arguments. Point sets are
immutable: the coordinate array is stored read-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _accel
from .errors import (
    InvalidParameterError,
    ParseError,
    RangeError,
    UnsupportedDimensionError,
)

PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)
GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
SPHERE_TOL = 1e-12


def _frozen(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PointSet:
    """N nodes in [0,1)^d, stored as a read-only (N, d) array."""

    points: np.ndarray

    def __init__(self, points, dim=None):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1) if dim in (None, 1) else pts.reshape(-1, dim)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise InvalidParameterError("a point set needs at least one point")
        if dim is not None and pts.shape[1] != dim:
            raise InvalidParameterError(
                f"points have {pts.shape[1]} coordinates, expected dim={dim}"
            )
        if pts.shape[1] < 1:
            raise InvalidParameterError("dim must be >= 1")
        if not np.all(np.isfinite(pts)):
            raise InvalidParameterError("coordinates must be finite")
        if np.any(pts < 0.0) or np.any(pts >= 1.0):
            raise RangeError("coordinates must lie in [0, 1)")
        object.__setattr__(self, "points", _frozen(pts))

    @property
    def dim(self):
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]

    def __eq__(self, other):
        return isinstance(other, PointSet) and np.array_equal(self.points, other.points)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SpherePointSet:
    """Unit vectors in R^3, stored as a read-only (N, 3) array."""

    points: np.ndarray

    def __init__(self, points):
        pts = np.asarray(points, dtype=float).reshape(-1, 3)
        if pts.shape[0] == 0:
            raise InvalidParameterError("a point set needs at least one point")
        norms = np.linalg.norm(pts, axis=1)
        if not np.all(np.abs(norms - 1.0) <= SPHERE_TOL):
            raise RangeError("sphere points must have unit norm")
        object.__setattr__(self, "points", _frozen(pts))

    @property
    def dim(self):
        return 3

    def __len__(self):
        return self.points.shape[0]

    def __eq__(self, other):
        return isinstance(other, SpherePointSet) and np.array_equal(
            self.points, other.points
        )

    __hash__ = None


def _check_count(n):
    if int(n) != n or n < 1:
        raise InvalidParameterError(f"N must be a positive integer, got {n!r}")
    return int(n)


def gen_kronecker(n, d, alphas):
    """Kronecker points ``frac(j * alpha_k)`` for j = 1..n.

    ``alphas`` may contain :class:`fractions.Fraction` entries, in which
    case that coordinate is computed exactly before rounding to float.
    """
    n = _check_count(n)
    alphas = list(alphas)
    if len(alphas) != d:
        raise InvalidParameterError(f"need {d} alphas, got {len(alphas)}")
    j = np.arange(1, n + 1, dtype=np.int64)
    cols = []
    for a in alphas:
        if isinstance(a, Fraction):
            p, q = a.numerator, a.denominator
            cols.append(((j * p) % q) / q)
            continue
        a = float(a)
        if not math.isfinite(a):
            raise InvalidParameterError(f"alpha must be finite, got {a!r}")
        x = j * a
        c = x - np.floor(x)
        c[c >= 1.0] = 0.0
        cols.append(c)
    return PointSet(np.column_stack(cols))


def gen_halton(n, d):
    """Halton points: radical inverses of j = 1..n in the first d prime bases."""
    n = _check_count(n)
    if d < 1:
        raise InvalidParameterError("dim must be >= 1")
    if d > len(PRIMES):
        raise UnsupportedDimensionError(f"Halton supports d <= {len(PRIMES)}, got {d}")
    j = np.arange(1, n + 1, dtype=np.int64)
    return PointSet(np.column_stack([_accel.radical_inverse(j, b) for b in PRIMES[:d]]))


def rng_from_seed(seed):
    """Counter-based generator so chunked fills are order independent."""
    return np.random.Generator(np.random.Philox(int(seed)))


def gen_random(n, d, seed):
    n = _check_count(n)
    if d < 1:
        raise InvalidParameterError("dim must be >= 1")
    return PointSet(rng_from_seed(seed).random((n, d)))


def gen_fibonacci_sphere(n):
    """Spiral points with z_j = 1 - (2j-1)/n and golden-angle longitudes."""
    n = _check_count(n)
    j = np.arange(1, n + 1, dtype=float)
    z = 1.0 - (2.0 * j - 1.0) / n
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = GOLDEN_ANGLE * j
    pts = np.column_stack((rho * np.cos(phi), rho * np.sin(phi), z))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    return SpherePointSet(pts)


# ------------------------------------------------------------------- CSV I/O


def save_points(points, path):
    if isinstance(points, SpherePointSet):
        header = "# sphere=1, dim=3"
    else:
        header = f"# dim={points.dim}"
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in points.points:
            fh.write(",".join("%.17g" % c for c in row) + "\n")


def _parse_header(line):
    if not line.startswith("#"):
        raise ParseError("missing '# dim=<d>' header", line=1)
    fields = {}
    for part in line[1:].split(","):
        if "=" not in part:
            raise ParseError(f"bad header field {part.strip()!r}", line=1)
        key, val = part.split("=", 1)
        fields[key.strip()] = val.strip()
    try:
        dim = int(fields["dim"])
        sphere = int(fields.get("sphere", "0")) == 1
    except (KeyError, ValueError):
        raise ParseError("header must contain an integer dim", line=1) from None
    if dim < 1 or (sphere and dim != 3):
        raise ParseError(f"invalid dim={dim}", line=1)
    return dim, sphere


def load_points(path):
    """Read a point file written by :func:`save_points`.

    Returns a :class:`PointSet` or, for ``# sphere=1`` files, a
    :class:`SpherePointSet`.
    """
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError("empty file", line=1)
    dim, sphere = _parse_header(lines[0].strip())
    rows = []
    for lineno, raw in enumerate(lines[1:], start=2):
        raw = raw.strip()
        if not raw:
            continue
        parts = raw.split(",")
        if len(parts) != dim:
            raise ParseError(f"expected {dim} columns, got {len(parts)}", line=lineno)
        try:
            row = [float(p) for p in parts]
        except ValueError:
            raise ParseError(f"non-numeric value in {raw!r}", line=lineno) from None
        if not all(math.isfinite(c) for c in row):
            raise ParseError("non-finite value", line=lineno)
        if sphere:
            if abs(math.sqrt(sum(c * c for c in row)) - 1.0) > SPHERE_TOL:
                raise RangeError("sphere point is not a unit vector", line=lineno)
        elif any(c < 0.0 or c >= 1.0 for c in row):
            raise RangeError(f"coordinate outside [0, 1) in {raw!r}", line=lineno)
        rows.append(row)
    if not rows:
        raise ParseError("no points in file", line=len(lines) + 1)
    if sphere:
        return SpherePointSet(rows)
    return PointSet(rows, dim=dim)
