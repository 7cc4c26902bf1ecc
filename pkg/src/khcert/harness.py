"""Experiment configs, the singular-simplex application, convergence studies and reports.

Reports are written as JSON lines with sorted keys and no wall-clock data,
so repeating a run with the same config produces identical bytes.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import integrands
from .calculus import QuadratureConfig, TrigPoly, multi_indices, qmc_error, region_rule, variation_on_region
from .certify import Thm1, Thm8, Thm10, VerifyConfig, _jsonable, decide, verify_kh
from .discrepancy import SearchConfig, intersection_discrepancy, star_discrepancy_exact
from .errors import ConfigError, InvalidParameterError, KHError
from .pointgen import PRIMES, gen_fibonacci_sphere, gen_halton, gen_kronecker, gen_random
from .regions import region_from_json, sec4_simplex
from .sphere import PairCap, SingleCap, SphereConfig, parse_sphere_region, verify_kh_sphere, zonal

GENERATORS = ("halton", "kronecker", "random", "fibonacci")
VARIANTS = ("thm1", "thm8", "thm10", "sphere")


def kronecker_alphas(d):
    """Fractional parts of sqrt(p) for the first d primes."""
    return [math.sqrt(p) % 1.0 for p in PRIMES[:d]]


def make_points(generator, n, d, seed=0):
    if generator == "halton":
        return gen_halton(n, d)
    if generator == "kronecker":
        return gen_kronecker(n, d, kronecker_alphas(d))
    if generator == "random":
        return gen_random(n, d, seed)
    if generator == "fibonacci":
        return gen_fibonacci_sphere(n)
    raise ConfigError(f"unknown generator {generator!r}; choose from {', '.join(GENERATORS)}")


@dataclass
class ExperimentConfig:
    name: str = "experiment"
    integrand: object = "exp-sum"  # name, {"trig": {...}} or {"zonal": [c0, c1, ...]}
    dim: int = 2
    region: object = field(default_factory=lambda: {"type": "full"})
    generator: str = "halton"
    ns: list = field(default_factory=lambda: [256, 1024])
    variant: dict = field(default_factory=lambda: {"name": "thm1", "p": 1.0, "q": "inf"})
    mx: int = 4096
    mt: int = 256
    samples: int = 1 << 16
    starts: int = 32
    seed: int = 0
    slack: float = 0.05
    output: str | None = None

    def __post_init__(self):
        self.ns = [int(n) for n in self.ns]
        if not self.ns or any(n < 1 for n in self.ns):
            raise ConfigError("the N ladder needs positive entries")
        if any(b <= a for a, b in zip(self.ns, self.ns[1:])):
            raise ConfigError("the N ladder must be strictly increasing")
        if self.generator not in GENERATORS:
            raise ConfigError(f"unknown generator {self.generator!r}")
        if self.variant.get("name") not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant.get('name')!r}")
        if (self.variant["name"] == "sphere") != (self.generator == "fibonacci"):
            raise ConfigError("the sphere variant goes with the fibonacci generator and vice versa")
        # resolve every named entity up front
        self.build_integrand()
        self.build_region()
        self.build_variant()

    @classmethod
    def from_dict(cls, obj):
        known = {f.name for f in fields(cls)}
        extra = set(obj) - known
        if extra:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(extra))}")
        try:
            return cls(**obj)
        except (TypeError, ValueError, KeyError) as exc:
            if isinstance(exc, KHError):
                raise
            raise ConfigError(f"invalid experiment config: {exc}") from exc

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            try:
                return cls.from_dict(json.load(fh))
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: {exc}") from exc

    def to_dict(self):
        return asdict(self)

    def digest(self):
        """sha256 of the canonical JSON form, ignoring the output path."""
        body = {k: v for k, v in self.to_dict().items() if k != "output"}
        return hashlib.sha256(canonical_json(body).encode()).hexdigest()

    # -- builders

    def build_integrand(self):
        obj = self.integrand
        if isinstance(obj, str):
            return integrands.by_name(obj, self.dim)
        if isinstance(obj, dict) and "trig" in obj:
            return TrigPoly.from_json(obj["trig"])
        if isinstance(obj, dict) and "zonal" in obj:
            return zonal(obj["zonal"])
        raise ConfigError(f"cannot build integrand from {obj!r}")

    def build_region(self):
        if self.variant.get("name") == "sphere":
            return parse_sphere_region(self.region)
        return region_from_json(self.region, self.dim)

    def build_variant(self):
        v = dict(self.variant)
        name = v.pop("name")
        try:
            if name == "thm1":
                q = v.get("q", "inf")
                return Thm1(float(v.get("p", 1.0)), math.inf if q in ("inf", None) else float(q))
            if name == "thm8":
                return Thm8(**v)
            if name == "thm10":
                return Thm10(**v)
            kernel = v.get("kernel", "pair")
            if kernel == "pair":
                return PairCap()
            if kernel == "single":
                return SingleCap(float(v.get("gamma", 2.6)))
        except TypeError as exc:
            raise ConfigError(f"bad parameters for variant {name}: {exc}") from exc
        raise ConfigError(f"unknown sphere kernel {kernel!r}")

    def verify_config(self):
        return VerifyConfig(
            slack=self.slack,
            seed=self.seed,
            mt=self.mt,
            mx=self.mx,
            volume_samples=self.samples,
            search=SearchConfig(starts=self.starts, seed=self.seed),
            quad=QuadratureConfig(samples=self.samples, seed=self.seed),
        )

    def sphere_config(self):
        return SphereConfig(mx=self.mx, seed=self.seed, samples=self.samples, slack=self.slack)


def canonical_json(obj):
    return json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":"))


def _with_context(exc, context):
    exc.args = (f"{context}: {exc}",)
    return exc


def run_experiment(cfg):
    """One report dict per N in the ladder; appended to ``cfg.output`` when set."""
    f = cfg.build_integrand()
    omega = cfg.build_region()
    variant = cfg.build_variant()
    digest = cfg.digest()
    reports = []
    for n in cfg.ns:
        try:
            pts = make_points(cfg.generator, n, cfg.dim, cfg.seed)
            if cfg.variant["name"] == "sphere":
                theta = float(cfg.variant.get("theta", 1.0))
                rep = verify_kh_sphere(f, omega, pts, theta, variant, cfg.sphere_config())
            else:
                rep = verify_kh(f, omega, pts, variant, cfg.verify_config())
        except KHError as exc:
            raise _with_context(exc, f"experiment {cfg.name!r}, N={n}") from exc
        out = rep.to_dict()
        out.update(
            experiment=cfg.name,
            config_hash=digest,
            generator=cfg.generator,
            budgets={"mx": cfg.mx, "mt": cfg.mt, "samples": cfg.samples, "starts": cfg.starts},
        )
        reports.append(out)
    if cfg.output:
        write_jsonl(reports, cfg.output)
    return reports


def write_jsonl(records, path):
    with open(path, "a") as fh:
        for rec in records:
            fh.write(canonical_json(rec) + "\n")


# ------------------------------------------------------ default matrix

MATRIX_REGIONS = {
    "box": {"type": "box", "lo": [0.15, 0.1], "hi": [0.45, 0.4]},
    "ball": {"type": "ball", "center": [0.35, 0.3], "r": 0.15},
    "simplex": {"type": "simplex-sec4", "eps": 0.1},
}
MATRIX_INTEGRANDS = ("exp-sum", "product-poly", "sec4-singular")
MATRIX_GENERATORS = ("halton", "kronecker", "random")


def default_matrix(n=4096, seed=0, variants=("thm1", "thm8", "thm10")):
    """The named acceptance matrix: integrands x regions x generators per variant.

    The cube and ball variants use the trigonometric integrands only.
    """
    out = []
    for vname in variants:
        funcs = MATRIX_INTEGRANDS if vname == "thm1" else ("exp-sum", "cos-mix")
        for fname in funcs:
            for rname, region in MATRIX_REGIONS.items():
                for gname in MATRIX_GENERATORS:
                    out.append(
                        ExperimentConfig(
                            name=f"{vname}/{fname}/{rname}/{gname}",
                            integrand=fname,
                            dim=2,
                            region=region,
                            generator=gname,
                            ns=[n],
                            variant={"name": vname} | ({"p": 1.0, "q": "inf"} if vname == "thm1" else {}),
                            seed=seed,
                        )
                    )
    return out


# ----------------------------------------------- singular-simplex study


def all_orders_sum(f, omega, cfg=None):
    """sum over |alpha| <= 2 of the L^1 norm of d^alpha f on the region (d = 2)."""
    if f.dim != 2:
        raise InvalidParameterError("the all-orders sum is implemented for d = 2")
    rule = region_rule(omega, cfg or QuadratureConfig())
    if rule is None:
        raise InvalidParameterError("no quadrature rule for this region")
    pts, wts = rule
    total = 0.0
    for alpha in multi_indices(2):
        total += float(np.dot(np.abs(f.partial_values(alpha, pts)), wts))
    for second in f.second_partials(pts):
        total += float(np.dot(np.abs(second), wts))
    return total


def loglog_slope(xs, ys):
    """Least-squares slope and R^2 of log y against log x."""
    lx, ly = np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float))
    slope, icpt = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + icpt)
    tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / tot if tot > 0 else 1.0
    return float(slope), float(r2)


@dataclass
class Sec4Table:
    rows: list
    variation_exponent: float
    all_orders_exponent: float | None
    exponent_limit: float
    all_rows_pass: bool
    margin_notes: list
    params: dict

    @property
    def exponent_ok(self):
        return self.variation_exponent <= self.exponent_limit

    def to_dict(self):
        return _jsonable(asdict(self) | {"exponent_ok": self.exponent_ok})

    def to_csv(self):
        buf = io.StringIO()
        cols = list(self.rows[0]) if self.rows else []
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for row in self.rows:
            w.writerow(row)
        return buf.getvalue()


def sec4_application(eps=(0.1, 0.05, 0.025), ns=(256, 1024, 4096), seed=0, d=2, slack=0.05,
                     exponent_limit=2.2, margin_n=4096, quad=None, search=None):
    """Error, variation and bound for f = 1/(x_1...x_d (1 - sum x)) on shrinking simplices."""
    quad = quad or QuadratureConfig(seed=seed)
    search = search or SearchConfig(seed=seed)
    f = integrands.sec4_singular(d)
    rows, variations, all_orders, notes = [], [], [], []
    for e in eps:
        omega = sec4_simplex(e, d)
        var, var_se, var_method = variation_on_region(f, omega, 1.0, quad)
        full = all_orders_sum(f, omega, quad) if d == 2 else None
        variations.append(var)
        all_orders.append(full)
        for n in ns:
            pts = gen_halton(n, d)
            err = qmc_error(f, omega, pts, quad)
            disc = intersection_discrepancy(omega, pts, search)
            bound = disc.value * var
            stderr = math.sqrt(err.stderr**2 + (disc.stderr * var) ** 2 + (disc.value * var_se) ** 2)
            ok = decide(err.value, bound, slack, stderr)
            rows.append(
                {
                    "eps": e,
                    "N": n,
                    "variation": var,
                    "all_orders": full,
                    "error": err.value,
                    "discrepancy": disc.value,
                    "bound": bound,
                    "pass": ok,
                }
            )
            if n == margin_n and not err.value * 2.0 <= bound:
                notes.append(f"eps={e}: error is within a factor 2 of the bound at N={n}")
    slope, _ = loglog_slope(eps, variations)
    full_slope = loglog_slope(eps, all_orders)[0] if d == 2 and len(eps) >= 2 else None
    return Sec4Table(
        rows=rows,
        variation_exponent=-slope,
        all_orders_exponent=None if full_slope is None else -full_slope,
        exponent_limit=exponent_limit,
        all_rows_pass=all(r["pass"] for r in rows),
        margin_notes=notes,
        params={"eps": list(eps), "N": list(ns), "seed": seed, "d": d, "slack": slack,
                "quadrature": {"order": quad.order, "levels": quad.levels},
                "search": {"starts": search.starts, "sweeps": search.sweeps, "seed": search.seed}},
    )


# --------------------------------------------------- convergence study


@dataclass
class SlopeFit:
    series: str
    slope: float | None
    r2: float | None
    degenerate: bool
    ns: list
    values: list

    def to_dict(self):
        return _jsonable(asdict(self))


def fit_series(name, ns, values, fit_range=None):
    lo, hi = fit_range or (min(ns), max(ns))
    pairs = [(n, v) for n, v in zip(ns, values) if lo <= n <= hi]
    usable = [(n, v) for n, v in pairs if v > 0 and math.isfinite(v)]
    if len(usable) < 2 or len(usable) < len(pairs):
        return SlopeFit(name, None, None, True, list(ns), list(values))
    slope, r2 = loglog_slope([p[0] for p in usable], [p[1] for p in usable])
    return SlopeFit(name, slope, r2, False, list(ns), list(values))


def convergence_study(cfg, fit_range=None, series=("lhs", "discrepancy")):
    """Log-log slopes over the config's N ladder; observational only.

    ``series`` may include "lhs", "discrepancy" (the variant's discrepancy)
    and "star" (exact star discrepancy of the point sets).
    """
    if len(cfg.ns) < 4:
        raise InvalidParameterError("a convergence study needs at least 4 ladder entries")
    out = {}
    if "lhs" in series or "discrepancy" in series:
        reports = run_experiment(cfg)
        if "lhs" in series:
            out["lhs"] = fit_series("lhs", cfg.ns, [r["lhs"] for r in reports], fit_range)
        if "discrepancy" in series:
            comp = [r["components"].get("discrepancy_total") or r["components"]["discrepancy"] for r in reports]
            out["discrepancy"] = fit_series("discrepancy", cfg.ns, [c["value"] for c in comp], fit_range)
    if "star" in series:
        vals = [star_discrepancy_exact(make_points(cfg.generator, n, cfg.dim, cfg.seed)).value for n in cfg.ns]
        out["star"] = fit_series("star", cfg.ns, vals, fit_range)
    return out
