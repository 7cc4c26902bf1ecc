"""Check quadrature-error bounds of the form |error| <= discrepancy x variation.

Each check computes both sides on concrete data and reports the ratio. The
absolute-bound variants pass when lhs <= rhs (1 + slack) + 4 sigma, where
sigma combines every Monte Carlo error that entered either side.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .calculus import (
    GridConfig,
    QuadratureConfig,
    SpectralNorm,
    TrigPoly,
    qmc_error,
    spectral_norm,
    variation_on_region,
    variation_p,
)
from .discrepancy import (
    SearchConfig,
    ball_l2_discrepancy,
    cube_l2_discrepancy,
    intersection_discrepancy,
    lq_discrepancy,
)
from .errors import InvalidParameterError
from .kernels import (
    GOLDEN_SIDE,
    CoefficientRule,
    ball_constant,
    bessel_lower_bound,
    check_diophantine,
    cube_constant,
    scan_bessel_radius,
)
from .pointgen import PointSet
from .regions import SignedMeasure, VolumeConfig

ABSOLUTE = "absolute-bound"
RATIO_STABILITY = "ratio-stability"


@dataclass
class VerificationReport:
    variant: str
    lhs: float
    rhs: float
    ratio: float
    passed: bool
    slack: float
    stderr: float
    criterion: str = ABSOLUTE
    components: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_dict(self):
        return _jsonable(asdict(self))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return _jsonable(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def decide(lhs, rhs, slack, stderr):
    return bool(lhs <= rhs * (1.0 + slack) + 4.0 * stderr)


def _ratio(lhs, rhs):
    if rhs > 0:
        return lhs / rhs
    return 0.0 if lhs == 0 else math.inf


# ------------------------------------------------------------- variants


@dataclass(frozen=True)
class Thm1:
    """Interval discrepancy times L^p variation, with 1/p + 1/q = 1."""

    p: float = 1.0
    q: float = math.inf

    def __post_init__(self):
        p, q = float(self.p), float(self.q)
        if p < 1 or q < 1:
            raise InvalidParameterError("p and q must be >= 1")
        inv = (0.0 if p == math.inf else 1.0 / p) + (0.0 if q == math.inf else 1.0 / q)
        if abs(inv - 1.0) > 1e-12:
            raise InvalidParameterError(f"need 1/p + 1/q = 1, got p={p}, q={q}")

    name = "thm1"


@dataclass(frozen=True)
class Thm8:
    """Translated-cube L^2 discrepancy times a product Sobolev norm."""

    a: float = GOLDEN_SIDE
    gamma: float = 2.0
    kmax: int = 100_000
    delta: float | None = None

    name = "thm8"


@dataclass(frozen=True)
class Thm10:
    """Translated-ball L^2 discrepancy times a radial Sobolev norm.

    ``r`` is the ball radius; when omitted it comes from the Bessel radius
    scan over Bessel arguments in (lo, hi), so r = r_arg / (2 pi).
    """

    r: float | None = None
    gamma: float | None = None
    beta: float = 1.3
    lo: float = 1.0
    hi: float = 2.0
    kmax: int = 10_000
    grid: int = 512

    name = "thm10"


@dataclass(frozen=True)
class VerifyConfig:
    slack: float = 0.05
    seed: int = 0
    mt: int = 256
    mx: int = 4096
    volume_samples: int = 1 << 16
    search: SearchConfig = SearchConfig()
    grid: GridConfig = GridConfig()
    quad: QuadratureConfig = QuadratureConfig()

    @property
    def volume(self):
        return VolumeConfig(self.volume_samples, self.seed)


@lru_cache(maxsize=32)
def cached_scan(alpha, lo, hi, beta, kmax, grid):
    return scan_bessel_radius(alpha, lo, hi, beta, kmax, grid)


def _variation(f, omega, p, cfg, notes):
    if isinstance(f, TrigPoly) or getattr(f, "periodic", True):
        return variation_p(f, p, cfg.grid), 0.0, "torus-grid"
    notes.append(
        "integrand is only defined on the region; its variation is taken over the region"
    )
    v, se, method = variation_on_region(f, omega, p, cfg.quad)
    return v, se, f"region-{method}"


def verify_kh(f, omega, pts, variant=None, cfg=None):
    """Compare the quadrature error of ``pts`` on ``omega`` with the bound."""
    variant = variant or Thm1()
    cfg = cfg or VerifyConfig()
    err = qmc_error(f, omega, pts, cfg.quad)
    mu = SignedMeasure.qmc(pts)
    n_pts = len(pts) if isinstance(pts, PointSet) else np.asarray(pts).shape[0]
    d = f.dim
    notes = []
    seeds = {"seed": cfg.seed, "search_seed": cfg.search.seed, "quadrature_seed": cfg.quad.seed}
    params = {"N": n_pts, "dim": d, "region": omega.to_json()}
    components = {"error": err.to_dict()}

    if isinstance(variant, Thm1):
        var, var_se, var_method = _variation(f, omega, variant.p, cfg, notes)
        if variant.q == math.inf:
            disc = intersection_discrepancy(omega, mu, cfg.search, cfg.volume)
            notes.append(
                "the interval supremum is a search lower bound; the 2^d factor keeps the "
                "bound valid for the averaged q = inf discrepancy"
            )
        else:
            disc = lq_discrepancy(omega, mu, variant.q, cfg.mt, cfg.mx, cfg.seed, cfg.volume)
        rhs = disc.value * var
        stderr = math.sqrt(err.stderr**2 + (disc.stderr * var) ** 2 + (disc.value * var_se) ** 2)
        components.update(
            discrepancy=disc.to_dict(),
            variation={"value": var, "stderr": var_se, "p": variant.p, "method": var_method},
        )
        params.update(p=variant.p, q=variant.q)
    elif isinstance(variant, Thm8):
        if not isinstance(f, TrigPoly):
            raise InvalidParameterError("the cube variant needs a trigonometric polynomial")
        dio = check_diophantine(variant.a, variant.delta or 0.0, variant.gamma, variant.kmax)
        delta = variant.delta if variant.delta is not None else dio.worst
        if f.degree > variant.kmax:
            raise InvalidParameterError("diophantine check does not cover the integrand's degree")
        CoefficientRule("cube", d, a=variant.a).coeff(f.freqs)
        const = cube_constant(variant.a, delta, d)
        norm = spectral_norm(f, SpectralNorm("product", variant.gamma))
        disc = cube_l2_discrepancy(omega, mu, variant.a, cfg.mx, cfg.seed, cfg.volume)
        rhs = const * disc.value * norm
        stderr = math.sqrt(err.stderr**2 + (const * norm * disc.stderr) ** 2)
        if not dio.ok:
            notes.append(f"diophantine condition fails at (h, k) = ({dio.h}, {dio.k})")
        components.update(
            discrepancy=disc.to_dict(),
            spectral_norm={"kind": "product", "gamma": variant.gamma, "value": norm},
            constant=const,
            diophantine=dio.to_dict() | {"delta_used": delta},
        )
        params.update(a=variant.a, gamma=variant.gamma)
    elif isinstance(variant, Thm10):
        if not isinstance(f, TrigPoly):
            raise InvalidParameterError("the ball variant needs a trigonometric polynomial")
        alpha = d / 2.0
        if variant.r is None:
            scan = cached_scan(alpha, variant.lo, variant.hi, variant.beta, variant.kmax, variant.grid)
            r = scan.r / (2.0 * math.pi)
            c_scan = scan.c
            components["scan"] = scan.to_dict()
        else:
            r = float(variant.r)
            c_scan = bessel_lower_bound(alpha, 2.0 * math.pi * r, variant.beta, variant.kmax)
        if not (0.0 < r < 0.5):
            raise InvalidParameterError(f"ball radius {r} outside (0, 1/2)")
        if np.max(np.sum(f.freqs.astype(float) ** 2, axis=1)) > variant.kmax:
            raise InvalidParameterError("the Bessel bound does not cover the integrand's support")
        gamma = variant.gamma if variant.gamma is not None else d / 2.0 + 2.0 * variant.beta
        CoefficientRule("ball", d, r=r).coeff(f.freqs)
        const = ball_constant(f.freqs, r, d, c_scan, variant.beta, gamma)
        norm = spectral_norm(f, SpectralNorm("radial", gamma))
        disc = ball_l2_discrepancy(omega, mu, r, cfg.mx, cfg.seed, cfg.volume)
        rhs = const * disc.value * norm
        stderr = math.sqrt(err.stderr**2 + (const * norm * disc.stderr) ** 2)
        components.update(
            discrepancy=disc.to_dict(),
            spectral_norm={"kind": "radial", "gamma": gamma, "value": norm},
            constant=const,
            bessel_bound=c_scan,
        )
        params.update(r=r, gamma=gamma, beta=variant.beta)
    else:
        raise InvalidParameterError(f"unknown variant {variant!r}")

    lhs = err.value
    return VerificationReport(
        variant=variant.name,
        lhs=lhs,
        rhs=rhs,
        ratio=_ratio(lhs, rhs),
        passed=decide(lhs, rhs, cfg.slack, stderr),
        slack=cfg.slack,
        stderr=stderr,
        components=components,
        seeds=seeds,
        params=params,
        notes=notes,
    )
