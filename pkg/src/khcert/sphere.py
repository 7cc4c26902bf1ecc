"""Zonal expansions, spherical caps and cap discrepancies on the unit sphere S^2.

Surface measure is normalised to total mass 1 throughout. A zonal function
with pole p is f(x) = sum_n c_n Z_n(x . p) with Z_n = (2n+1) P_n, so Z_n(1)
equals the dimension of the degree-n harmonics and Z_n acts as the reproducing
kernel of that space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .calculus import SpectralNorm, spectral_norm
from .certify import RATIO_STABILITY, VerificationReport, _ratio, decide
from .errors import DegenerateThetaError, InvalidParameterError, RegionError
from .estimates import EXACT, MONTE_CARLO, DiscrepancyEstimate
from .pointgen import SpherePointSet, rng_from_seed

# |c_n| n^{3/2} below this counts as a vanishing cap coefficient
DEGENERATE_TOL = 1e-10
EXPLICIT = "explicit-constant"


def legendre(n, z):
    """P_n(z) by the three-term recurrence; scalar or array z in [-1, 1]."""
    n = int(n)
    if n < 0:
        raise InvalidParameterError("degree must be >= 0")
    arr = np.asarray(z, dtype=float)
    if np.any(np.abs(arr) > 1.0) or not np.all(np.isfinite(arr)):
        raise InvalidParameterError("Legendre argument must lie in [-1, 1]")
    vals = _accel.legendre_table(n, np.ascontiguousarray(arr.ravel()))[n]
    return float(vals[0]) if arr.ndim == 0 else vals.reshape(arr.shape)


def legendre_all(nmax, z):
    """Rows P_0..P_nmax evaluated at the points z."""
    arr = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(np.abs(arr) > 1.0):
        raise InvalidParameterError("Legendre argument must lie in [-1, 1]")
    return _accel.legendre_table(int(nmax), np.ascontiguousarray(arr))


def _unit(v):
    v = np.asarray(v, dtype=float).reshape(3)
    norm = np.linalg.norm(v)
    if not norm > 0:
        raise InvalidParameterError("direction must be non-zero")
    return v / norm


E_Z = (0.0, 0.0, 1.0)


# --------------------------------------------------------------- regions


class SphereRegion:
    def contains_many(self, pts):
        raise NotImplementedError

    @property
    def area(self):
        """Normalised surface area."""
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True)
class FullSphere(SphereRegion):
    def contains_many(self, pts):
        return np.ones(np.asarray(pts).shape[0], dtype=bool)

    @property
    def area(self):
        return 1.0

    def to_json(self):
        return {"type": "full-sphere"}


@dataclass(frozen=True)
class SphereCap(SphereRegion):
    """{y : y . center >= cos(theta)}."""

    center: tuple = E_Z
    theta: float = math.pi / 2

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in _unit(self.center)))
        if not (0.0 < self.theta < math.pi):
            raise RegionError("cap radius must lie in (0, pi)")

    def contains_many(self, pts):
        return np.asarray(pts, dtype=float) @ np.asarray(self.center) >= math.cos(self.theta)

    @property
    def area(self):
        return (1.0 - math.cos(self.theta)) / 2.0

    def to_json(self):
        return {"type": "cap", "center": list(self.center), "theta": self.theta}


def hemisphere():
    return SphereCap(E_Z, math.pi / 2)


def parse_sphere_region(text):
    """'full', 'hemisphere' or 'cap:<theta>' (caps centred at the north pole)."""
    text = text.strip().lower()
    if text == "full":
        return FullSphere()
    if text == "hemisphere":
        return hemisphere()
    if text.startswith("cap:"):
        try:
            theta = float(text[4:])
        except ValueError as exc:
            raise InvalidParameterError(f"bad cap radius in {text!r}") from exc
        return SphereCap(E_Z, theta)
    raise InvalidParameterError(f"unknown sphere region {text!r}")


def cap_intersection_area(centers, theta1, center2, theta2):
    """Normalised area of cap(c, theta1) ∩ cap(center2, theta2) for each row c."""
    c = np.asarray(centers, dtype=float).reshape(-1, 3)
    c2 = _unit(center2)
    cg = np.clip(c @ c2, -1.0, 1.0)
    g = np.arccos(cg)
    a1 = 2.0 * math.pi * (1.0 - math.cos(theta1))
    a2 = 2.0 * math.pi * (1.0 - math.cos(theta2))
    out = np.empty(c.shape[0])
    inside = g <= abs(theta1 - theta2)
    apart = g >= theta1 + theta2
    cover = g >= 2.0 * math.pi - theta1 - theta2
    out[inside] = min(a1, a2)
    out[apart] = 0.0
    out[cover & ~apart] = a1 + a2 - 4.0 * math.pi
    part = ~(inside | apart | cover)
    if part.any():
        ct1, st1 = math.cos(theta1), math.sin(theta1)
        ct2, st2 = math.cos(theta2), math.sin(theta2)
        cgp = cg[part]
        sgp = np.sin(g[part])

        def acos(x):
            return np.arccos(np.clip(x, -1.0, 1.0))

        out[part] = 2.0 * (
            math.pi
            - acos((cgp - ct1 * ct2) / (st1 * st2))
            - ct1 * acos((ct2 - cgp * ct1) / (sgp * st1))
            - ct2 * acos((ct1 - cgp * ct2) / (sgp * st2))
        )
    return out / (4.0 * math.pi)


def uniform_sphere(rng, m):
    """Area-preserving cylindrical map applied to seeded uniforms."""
    u = rng.random((m, 2))
    z = 2.0 * u[:, 0] - 1.0
    phi = 2.0 * math.pi * u[:, 1]
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.column_stack((rho * np.cos(phi), rho * np.sin(phi), z))


# ------------------------------------------------------- zonal functions


def _cap_coeff_array(theta, nmax):
    c = math.cos(theta)
    p = legendre_all(nmax + 1, c)[:, 0]
    out = np.empty(nmax + 1)
    out[0] = (1.0 - c) / 2.0
    n = np.arange(1, nmax + 1)
    out[1:] = (p[n - 1] - p[n + 1]) / (2.0 * (2 * n + 1))
    return out


@dataclass(frozen=True)
class ZonalExpansion:
    """f(x) = sum_n coeffs[n] Z_n(x . pole)."""

    coeffs: np.ndarray
    pole: tuple = E_Z

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).reshape(-1)
        if c.size == 0:
            raise InvalidParameterError("a zonal expansion needs at least c_0")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "pole", tuple(float(v) for v in _unit(self.pole)))

    dim = 3

    @property
    def degree(self):
        return self.coeffs.shape[0] - 1

    def evaluate(self, z):
        """sum_n c_n (2n+1) P_n(z)."""
        arr = np.asarray(z, dtype=float)
        table = legendre_all(self.degree, np.clip(arr.ravel(), -1.0, 1.0))
        n = np.arange(self.degree + 1)
        vals = (self.coeffs * (2 * n + 1)) @ table
        return float(vals[0]) if arr.ndim == 0 else vals.reshape(arr.shape)

    def __call__(self, pts):
        return self.evaluate(np.asarray(pts, dtype=float).reshape(-1, 3) @ np.asarray(self.pole))

    def integral(self, region):
        """Exact normalised integral over the sphere or a cap coaxial with the pole.

        Returns None for other regions.
        """
        if isinstance(region, FullSphere):
            return float(self.coeffs[0])
        if isinstance(region, SphereCap):
            cg = float(np.dot(region.center, self.pole))
            if abs(abs(cg) - 1.0) > 1e-14:
                return None
            n = np.arange(self.degree + 1)
            sign = np.ones_like(n, dtype=float) if cg > 0 else (-1.0) ** n
            cap = _cap_coeff_array(region.theta, self.degree)
            return float(np.sum(self.coeffs * (2 * n + 1) * cap * sign))
        return None


def zonal(coeffs, pole=E_Z):
    return ZonalExpansion(np.asarray(coeffs, dtype=float), pole)


def cap_coeffs(theta, nmax):
    """Zonal coefficients of the cap indicator chi{x . y >= cos(theta)}."""
    if not (0.0 < theta < math.pi):
        raise InvalidParameterError("cap radius must lie in (0, pi)")
    if nmax < 0:
        raise InvalidParameterError("nmax must be >= 0")
    return ZonalExpansion(_cap_coeff_array(theta, int(nmax)))


# --------------------------------------------------------- cap kernels


@dataclass(frozen=True)
class CapKernel:
    """Single cap of radius theta, or the complex pair chi_theta + i chi_{2 theta}."""

    theta: float
    pair: bool = False

    def __post_init__(self):
        hi = math.pi / 2 if self.pair else math.pi
        if not (0.0 < self.theta < hi):
            raise InvalidParameterError(f"cap radius must lie in (0, {hi:.6g})")

    @property
    def kind(self):
        return "pair" if self.pair else "single"

    def denominators(self, nmax):
        """c_n(theta), or c_n(theta) + i c_n(2 theta), for n = 0..nmax."""
        c = _cap_coeff_array(self.theta, nmax)
        if not self.pair:
            return c.astype(complex)
        return c + 1j * _cap_coeff_array(2.0 * self.theta, nmax)

    def degenerate(self, nmax):
        den = self.denominators(nmax)
        n = np.arange(nmax + 1, dtype=float)
        scale = np.maximum(n, 1.0) ** 1.5
        return [int(k) for k in np.nonzero(np.abs(den) * scale < DEGENERATE_TOL)[0]]

    def phi(self, nmax):
        """phi(n) = 1 / denominator(n) for n = 0..nmax."""
        bad = self.degenerate(nmax)
        if bad:
            raise DegenerateThetaError(self.theta, bad)
        return 1.0 / self.denominators(nmax)


def cap_phi(kernel, n):
    if n < 0:
        raise InvalidParameterError("n must be >= 0")
    return complex(kernel.phi(int(n))[int(n)])


@dataclass(frozen=True)
class PhiGrowth:
    theta: float
    kind: str
    nmax: int
    c1: float
    c2: float
    exponent: float
    slope: float

    def to_dict(self):
        return dict(self.__dict__)


def verify_phi_growth(theta, nmax, kind="pair"):
    """Band constants of |phi(n)| against n^{3/2} and a log-log slope over 1..nmax."""
    if kind not in ("single", "pair"):
        raise InvalidParameterError("kind must be 'single' or 'pair'")
    if nmax < 16:
        raise InvalidParameterError("nmax must be >= 16")
    kernel = CapKernel(theta, kind == "pair")
    mag = np.abs(kernel.phi(nmax))[1:]
    n = np.arange(1, nmax + 1, dtype=float)
    s = 1.5 if kind == "pair" else 2.51
    slope = float(np.polyfit(np.log(n), np.log(mag), 1)[0])
    return PhiGrowth(
        theta=float(theta),
        kind=kind,
        nmax=int(nmax),
        c1=float(np.min(mag * n**-1.5)),
        c2=float(np.max(mag * n**-s)),
        exponent=s,
        slope=slope,
    )


# --------------------------------------------------------- measures


@dataclass(frozen=True)
class SphereMeasure:
    """sum_j w_j delta_{x_j} - coeff * (normalised surface measure)."""

    atoms: np.ndarray
    weights: np.ndarray
    uniform_coeff: float = 0.0

    @classmethod
    def qmc(cls, pts):
        p = pts.points if isinstance(pts, SpherePointSet) else SpherePointSet(pts).points
        return cls(p, np.full(p.shape[0], 1.0 / p.shape[0]), 1.0)

    @classmethod
    def zero(cls):
        return cls(np.zeros((0, 3)), np.zeros(0), 0.0)

    @classmethod
    def uniform_only(cls, coeff=1.0):
        return cls(np.zeros((0, 3)), np.zeros(0), float(coeff))


@dataclass(frozen=True)
class SphereConfig:
    mx: int = 4096
    seed: int = 0
    samples: int = 1 << 16
    method: str = "auto"  # or "monte-carlo" for the uniform part
    slack: float = 0.05

    def __post_init__(self):
        if self.method not in ("auto", "monte-carlo"):
            raise InvalidParameterError("method must be 'auto' or 'monte-carlo'")


def _exact_cap_area(omega, centers, theta):
    if isinstance(omega, FullSphere):
        return np.full(centers.shape[0], (1.0 - math.cos(theta)) / 2.0)
    if isinstance(omega, SphereCap):
        return cap_intersection_area(centers, theta, omega.center, omega.theta)
    return None


def cap_l2_discrepancy(omega, mu, theta, mx=4096, seed=0, samples=1 << 16, method="auto"):
    """RMS over uniform centres x of mu(cap(x, theta) ∩ omega)."""
    if not (0.0 < theta < math.pi):
        raise InvalidParameterError("cap radius must lie in (0, pi)")
    rng = rng_from_seed(seed)
    centers = uniform_sphere(rng, mx)
    cos_t = math.cos(theta)
    keep = omega.contains_many(mu.atoms) if mu.atoms.shape[0] else np.zeros(0, bool)
    atoms = np.ascontiguousarray(mu.atoms[keep])
    weights = np.ascontiguousarray(mu.weights[keep])
    v = _accel.cap_sums(centers, cos_t, atoms, weights)
    uniform = "none"
    if mu.uniform_coeff != 0.0:
        exact = None if method == "monte-carlo" else _exact_cap_area(omega, centers, theta)
        if exact is not None:
            v = v - mu.uniform_coeff * exact
            uniform = EXACT
        else:
            cloud = uniform_sphere(rng, samples)
            cloud = np.ascontiguousarray(cloud[omega.contains_many(cloud)])
            w = np.full(cloud.shape[0], mu.uniform_coeff / samples)
            v = v - _accel.cap_sums(centers, cos_t, cloud, w)
            uniform = MONTE_CARLO
    sq = v * v
    value = math.sqrt(float(sq.mean()))
    stderr = 0.0
    if mx > 1 and value > 0.0:
        stderr = float(sq.std(ddof=1)) / math.sqrt(mx) / (2.0 * value)
    params = {"theta": theta, "mx": mx, "seed": seed, "uniform": uniform}
    if uniform == MONTE_CARLO:
        params["samples"] = samples
    return DiscrepancyEstimate(value, MONTE_CARLO, stderr, params)


# ---------------------------------------------------------- verification


@dataclass(frozen=True)
class SingleCap:
    gamma: float = 2.6

    def __post_init__(self):
        if not self.gamma > 2.5:
            raise InvalidParameterError("the single-cap bound needs gamma > 5/2")

    name = "sphere-single"


@dataclass(frozen=True)
class PairCap:
    gamma = 1.5
    name = "sphere-pair"


def _sphere_points(pts):
    return pts.points if isinstance(pts, SpherePointSet) else SpherePointSet(pts).points


def sphere_qmc_error(f, omega, pts, cfg):
    """|N^-1 sum (f chi_omega)(x_j) - integral of f over omega| and its stderr."""
    p = _sphere_points(pts)
    inside = omega.contains_many(p)
    node_average = float(np.sum(f(p[inside]))) / p.shape[0] if inside.any() else 0.0
    exact = f.integral(omega) if hasattr(f, "integral") else None
    if exact is not None:
        return abs(node_average - exact), 0.0, exact, EXACT
    cloud = uniform_sphere(rng_from_seed(cfg.seed + 1), cfg.samples)
    vals = np.where(omega.contains_many(cloud), f(cloud), 0.0)
    integral = float(vals.mean())
    return abs(node_average - integral), float(vals.std(ddof=1)) / math.sqrt(cfg.samples), integral, MONTE_CARLO


def verify_kh_sphere(f, omega, pts, theta, variant=None, cfg=None):
    """Compare the quadrature error with cap discrepancy times the zonal Sobolev norm.

    The observed constant lhs / (D ||f||) goes into ``ratio``. ``passed``
    applies the explicit constant max_n 1/(|phi denominator| (1+n^2)^(gamma/2))
    over the integrand's degrees; stability of the ratio across N is judged
    by ``sphere_ratio_study``.
    """
    variant = variant or PairCap()
    cfg = cfg or SphereConfig()
    kernel = CapKernel(theta, isinstance(variant, PairCap))
    nmax = f.degree
    den = kernel.denominators(nmax)
    bad = kernel.degenerate(nmax)
    if bad:
        raise DegenerateThetaError(theta, bad)
    lhs, lhs_se, integral, int_method = sphere_qmc_error(f, omega, pts, cfg)
    mu = SphereMeasure.qmc(pts)
    discs = [cap_l2_discrepancy(omega, mu, theta, cfg.mx, cfg.seed, cfg.samples, cfg.method)]
    if kernel.pair:
        discs.append(
            cap_l2_discrepancy(omega, mu, 2.0 * theta, cfg.mx, cfg.seed, cfg.samples, cfg.method)
        )
    d_val = sum(d.value for d in discs)
    d_se = math.sqrt(sum(d.stderr**2 for d in discs))
    gamma = variant.gamma
    norm = spectral_norm(f, SpectralNorm("zonal", gamma))
    n = np.arange(nmax + 1, dtype=float)
    support = np.abs(f.coeffs) > 0
    const = 0.0
    if support.any():
        const = float(np.max(1.0 / (np.abs(den[support]) * (1.0 + n[support] ** 2) ** (gamma / 2.0))))
    unit = d_val * norm
    rhs = const * unit
    stderr = math.sqrt(lhs_se**2 + (const * norm * d_se) ** 2)
    return VerificationReport(
        variant=variant.name,
        lhs=lhs,
        rhs=rhs,
        ratio=_ratio(lhs, unit),
        passed=decide(lhs, rhs, cfg.slack, stderr),
        slack=cfg.slack,
        stderr=stderr,
        criterion=EXPLICIT,
        components={
            "discrepancy": [d.to_dict() for d in discs],
            "discrepancy_total": {"value": d_val, "stderr": d_se},
            "spectral_norm": {"kind": "zonal", "gamma": gamma, "value": norm},
            "constant": const,
            "integral": {"value": integral, "stderr": lhs_se, "method": int_method},
        },
        seeds={"seed": cfg.seed},
        params={
            "N": int(_sphere_points(pts).shape[0]),
            "theta": theta,
            "kernel": kernel.kind,
            "region": omega.to_json(),
            "mx": cfg.mx,
            "samples": cfg.samples,
        },
        notes=["ratio is the observed constant lhs / (discrepancy x norm)"],
    )


@dataclass
class RatioStudy:
    rows: list
    passed: bool
    band: float
    slope: float | None
    criterion: str = RATIO_STABILITY
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "rows": self.rows,
            "passed": self.passed,
            "band": self.band,
            "slope": self.slope,
            "criterion": self.criterion,
            "notes": self.notes,
        }


def sphere_ratio_study(f, omega, ns, theta, variant=None, cfg=None, band=2.0, generator=None):
    """Observed ratios over an N ladder; passes when each ratio is at most ``band``
    times the previous one and every explicit-constant check holds."""
    ns = [int(n) for n in ns]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise InvalidParameterError("the N ladder must be strictly increasing")
    from .pointgen import gen_fibonacci_sphere

    gen = generator or gen_fibonacci_sphere
    reports = [verify_kh_sphere(f, omega, gen(n), theta, variant, cfg) for n in ns]
    ratios = [r.ratio for r in reports]
    stable = all(b <= band * a for a, b in zip(ratios, ratios[1:]))
    rows = [
        {
            "N": n,
            "lhs": r.lhs,
            "discrepancy": r.components["discrepancy_total"]["value"],
            "norm": r.components["spectral_norm"]["value"],
            "ratio": r.ratio,
            "explicit_pass": r.passed,
        }
        for n, r in zip(ns, reports)
    ]
    pos = [(n, q) for n, q in zip(ns, ratios) if q > 0]
    slope = None
    if len(pos) >= 2:
        slope = float(np.polyfit(np.log([p[0] for p in pos]), np.log([p[1] for p in pos]), 1)[0])
    return RatioStudy(rows, bool(stable and all(r.passed for r in reports)), band, slope)
