"""Named integrands used by the CLI and the acceptance experiments."""

from __future__ import annotations

import itertools
import math

import numpy as np

from .calculus import CallbackFunction, TrigPoly, multi_indices
from .errors import InvalidParameterError, UndefinedPairingError
from .regions import AxisBox, Ball, Clipped, Empty, FullCube, Polytope

NAMES = ("const", "exp-sum", "cos-mix", "product-poly", "sec4-singular")
TRIG_NAMES = ("const", "exp-sum", "cos-mix")


def const(d, value=1.0):
    return TrigPoly.constant(d, value)


def exp_sum(d):
    """1 + sum_k cos(2 pi x_k) + 0.5 cos(2 pi (x_1 + ... + x_d)), as exponentials."""
    coeffs = {(0,) * d: 1.0}
    for k in range(d):
        for s in (1, -1):
            n = [0] * d
            n[k] = s
            coeffs[tuple(n)] = coeffs.get(tuple(n), 0.0) + 0.5
    for s in (1, -1):
        key = (s,) * d
        coeffs[key] = coeffs.get(key, 0.0) + 0.25
    return TrigPoly(d, coeffs)


def cos_mix(d):
    """0.5 + 0.4 sum_k cos(6 pi x_k) + 0.3 cos(2 pi (2 x_1 - x_2 - ... - x_d))."""
    coeffs = {(0,) * d: 0.5}
    for k in range(d):
        for s in (3, -3):
            n = [0] * d
            n[k] = s
            coeffs[tuple(n)] = coeffs.get(tuple(n), 0.0) + 0.2
    mixed = [2] + [-1] * (d - 1)
    for s in (1, -1):
        key = tuple(s * m for m in mixed)
        coeffs[key] = coeffs.get(key, 0.0) + 0.15
    return TrigPoly(d, coeffs)


def _bump(x):
    u = x - np.floor(x)
    return 30.0 * u * u * (1.0 - u) ** 2


def _bump_prime(x):
    u = x - np.floor(x)
    return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u)


def product_poly(d):
    """prod_k 30 x_k^2 (1 - x_k)^2: unit mean, periodic and C^2 on the torus."""

    def mixed(alpha):
        def f(x):
            x = np.asarray(x, dtype=float)
            out = np.ones(x.shape[0])
            for k, a in enumerate(alpha):
                out *= _bump_prime(x[:, k]) if a else _bump(x[:, k])
            return out

        return f

    partials = {a: mixed(a) for a in multi_indices(d) if any(a)}
    return CallbackFunction(d, mixed((0,) * d), partials, name="product-poly")


# ------------------------------------------------------ singular integrand


def _support(region, u):
    """max over the region of u . x (an upper bound for clipped regions)."""
    u = np.asarray(u, dtype=float)
    if isinstance(region, Empty):
        return -math.inf
    if isinstance(region, (AxisBox, FullCube)):
        lo, hi = region.bbox()
        return float(np.sum(np.where(u > 0, u * hi, u * lo)))
    if isinstance(region, Ball):
        return float(region.center @ u + region.radius * np.linalg.norm(u))
    if isinstance(region, Polytope):
        v = region._vertices
        return float(np.max(v @ u)) if v.size else -math.inf
    if isinstance(region, Clipped):
        return min(_support(region.base, u), _support(region.box, u))
    raise InvalidParameterError(f"no support function for {type(region).__name__}")


class SingularSimplexFunction(CallbackFunction):
    """f(x) = 1 / (x_1 ... x_d (1 - x_1 - ... - x_d)), smooth only inside the simplex.

    All mixed partials over a set S of coordinates are exact:
    d^S f = sum_{T ⊆ S} |T|! s^-(|T|+1) prod_{k in S-T} (-x_k^-2) prod_{k not in S-T} x_k^-1,
    with s = 1 - sum x.
    """

    def __init__(self, d=2):
        partials = {a: self._mixed(a) for a in multi_indices(d) if any(a)}
        super().__init__(d, self._mixed((0,) * d), partials, periodic=False, name="sec4-singular")

    def _mixed(self, alpha):
        axes = [k for k, a in enumerate(alpha) if a]
        d = len(alpha)

        def f(x):
            x = np.asarray(x, dtype=float)
            s = 1.0 - x.sum(axis=1)
            out = np.zeros(x.shape[0])
            for r in range(len(axes) + 1):
                for T in itertools.combinations(axes, r):
                    term = math.factorial(r) * s ** (-(r + 1))
                    for k in range(d):
                        if k in axes and k not in T:
                            term = term * (-1.0 / x[:, k] ** 2)
                        else:
                            term = term / x[:, k]
                    out += term
            return out

        return f

    def second_partials(self, x):
        """The pure second derivatives d^2f/dx_k^2 (used for the all-orders sum)."""
        x = np.asarray(x, dtype=float)
        s = 1.0 - x.sum(axis=1)
        f = self.value(x)
        out = []
        for k in range(self.dim):
            a = -1.0 / x[:, k] + 1.0 / s
            out.append(f * (a * a + 1.0 / x[:, k] ** 2 + 1.0 / s**2))
        return out

    def check_region(self, region):
        d = self.dim
        for k in range(d):
            u = np.zeros(d)
            u[k] = -1.0
            if -_support(region, u) <= 0.0:
                raise UndefinedPairingError(
                    f"the region touches the singular hyperplane x_{k + 1} = 0"
                )
        if _support(region, np.ones(d)) >= 1.0:
            raise UndefinedPairingError("the region touches the singular hyperplane x_1 + ... + x_d = 1")


def sec4_singular(d=2):
    return SingularSimplexFunction(d)


def by_name(name, d):
    if name == "const":
        return const(d)
    if name == "exp-sum":
        return exp_sum(d)
    if name == "cos-mix":
        return cos_mix(d)
    if name == "product-poly":
        return product_poly(d)
    if name == "sec4-singular":
        return sec4_singular(d)
    raise InvalidParameterError(f"unknown integrand {name!r}; choose from {', '.join(NAMES)}")
