"""Command line entry point: ``khcert <subcommand> ...``.

Exit status is 0 when every requested verification passes, 1 when one
fails and 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import __version__
from .calculus import GridConfig, QuadratureConfig, variation_on_region, variation_p
from .certify import Thm1, Thm8, Thm10, VerifyConfig, _jsonable, verify_kh
from .discrepancy import (
    SearchConfig,
    ball_l2_discrepancy,
    cube_l2_discrepancy,
    intersection_discrepancy,
    lq_discrepancy,
    star_discrepancy_exact,
)
from .errors import KHError
from .harness import (
    ExperimentConfig,
    convergence_study,
    default_matrix,
    make_points,
    run_experiment,
    sec4_application,
    write_jsonl,
)
from .integrands import NAMES, by_name
from .kernels import GOLDEN_SIDE, scan_bessel_radius
from .pointgen import SpherePointSet, gen_kronecker, load_points, save_points
from .regions import SignedMeasure, VolumeConfig, region_from_json
from .sphere import (
    PairCap,
    SingleCap,
    SphereConfig,
    parse_sphere_region,
    verify_kh_sphere,
    verify_phi_growth,
    zonal,
)


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in text.split(",") if v.strip()]


def parse_region(text, dim):
    """JSON literal, JSON file (optionally @-prefixed), or one of: full, simplex:<eps>, box:<lo..>,<hi..>, ball:<c..>,<r>."""
    text = text.strip()
    if text.startswith("@") or (text.endswith(".json") and os.path.isfile(text)):
        with open(text.lstrip("@")) as fh:
            return region_from_json(json.load(fh), dim)
    if text.startswith("{"):
        return region_from_json(json.loads(text), dim)
    kind, _, rest = text.partition(":")
    vals = _floats(rest) if rest else []
    if kind == "full":
        return region_from_json({"type": "full", "dim": dim})
    if kind == "simplex":
        return region_from_json({"type": "simplex-sec4", "eps": vals[0], "dim": dim})
    if kind == "box" and len(vals) == 2 * dim:
        return region_from_json({"type": "box", "lo": vals[:dim], "hi": vals[dim:]})
    if kind == "ball" and len(vals) == dim + 1:
        return region_from_json({"type": "ball", "center": vals[:dim], "r": vals[dim]})
    raise argparse.ArgumentTypeError(f"cannot parse region {text!r}")


def _emit(obj, args):
    text = json.dumps(_jsonable(obj), indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load_torus_points(path):
    pts = load_points(path)
    if isinstance(pts, SpherePointSet):
        raise KHError(f"{path} holds sphere points")
    return pts


# ---------------------------------------------------------- subcommands


def cmd_gen(args):
    if args.kind == "kronecker" and args.alphas:
        pts = gen_kronecker(args.n, args.dim, _floats(args.alphas))
    else:
        pts = make_points(args.kind, args.n, args.dim, args.seed)
    if args.out:
        save_points(pts, args.out)
    else:
        header = "# sphere=1, dim=3" if isinstance(pts, SpherePointSet) else f"# dim={pts.dim}"
        print(header)
        for row in pts.points:
            print(",".join(f"{v:.17g}" for v in row))
    return 0


def cmd_disc(args):
    pts = _load_torus_points(args.points)
    d = pts.dim
    omega = parse_region(args.region, d)
    mu = SignedMeasure.qmc(pts)
    vol = VolumeConfig(args.samples, args.seed)
    if args.kind == "star":
        est = star_discrepancy_exact(pts)
    elif args.kind in ("intersect", "intersection"):
        est = intersection_discrepancy(omega, pts, SearchConfig(starts=args.starts, seed=args.seed), vol)
    elif args.kind == "lq":
        est = lq_discrepancy(omega, mu, args.q, args.mt, args.mx, args.seed, vol)
    elif args.kind == "cube":
        est = cube_l2_discrepancy(omega, mu, args.a, args.mx, args.seed, vol)
    else:
        est = ball_l2_discrepancy(omega, mu, args.r, args.mx, args.seed, vol)
    _emit(est.to_dict() | {"kind": args.kind, "N": len(pts)}, args)
    return 0


def cmd_var(args):
    f = by_name(args.integrand, args.dim)
    if args.region:
        omega = parse_region(args.region, args.dim)
        quad = QuadratureConfig(samples=args.samples, seed=args.seed)
        value, stderr, method = variation_on_region(f, omega, args.p, quad)
    else:
        value, stderr, method = variation_p(f, args.p, GridConfig(args.grid)), 0.0, "torus-grid"
    _emit({"integrand": args.integrand, "p": args.p, "value": value, "stderr": stderr, "method": method}, args)
    return 0


def _variant_from_args(args):
    if args.variant == "thm1":
        return Thm1(args.p, args.q)
    if args.variant == "thm8":
        return Thm8(a=args.a, gamma=args.gamma or 2.0)
    return Thm10(r=args.r, gamma=args.gamma, beta=args.beta)


def cmd_verify(args):
    if args.matrix:
        reports = []
        for cfg in default_matrix(n=args.n or 4096, seed=args.seed):
            reports.extend(run_experiment(cfg))
    elif args.config:
        cfg = ExperimentConfig.load(args.config)
        reports = run_experiment(cfg)
    else:
        f = by_name(args.integrand, args.dim)
        omega = parse_region(args.region, args.dim)
        if args.points:
            pts = _load_torus_points(args.points)
        else:
            pts = make_points(args.generator, args.n or 1024, args.dim, args.seed)
        cfg = VerifyConfig(
            slack=args.slack,
            seed=args.seed,
            mx=args.mx,
            mt=args.mt,
            volume_samples=args.samples,
            search=SearchConfig(starts=args.starts, seed=args.seed),
            quad=QuadratureConfig(samples=args.samples, seed=args.seed),
        )
        reports = [verify_kh(f, omega, pts, _variant_from_args(args), cfg).to_dict()]
    if args.jsonl:
        write_jsonl(reports, args.jsonl)
    _emit(reports if len(reports) > 1 else reports[0], args)
    return 0 if all(r["passed"] for r in reports) else 1


def cmd_sphere(args):
    pts = load_points(args.points)
    if not isinstance(pts, SpherePointSet):
        raise KHError(f"{args.points} does not hold sphere points")
    f = zonal(_floats(args.coeffs))
    omega = parse_sphere_region(args.region)
    variant = PairCap() if args.variant == "pair" else SingleCap(args.gamma)
    cfg = SphereConfig(mx=args.mx, seed=args.seed, samples=args.samples, slack=args.slack)
    report = verify_kh_sphere(f, omega, pts, args.theta, variant, cfg)
    out = report.to_dict()
    if args.nmax:
        out["phi_growth"] = verify_phi_growth(args.theta, args.nmax, args.variant).to_dict()
    _emit(out, args)
    return 0 if report.passed else 1


def cmd_scan(args):
    res = scan_bessel_radius(args.alpha, args.lo, args.hi, args.beta, args.kmax, args.grid)
    out = res.to_dict()
    out["ball_radius"] = res.r / (2.0 * math.pi)
    _emit(out, args)
    return 0


def cmd_sec4(args):
    quad = QuadratureConfig(samples=args.samples, seed=args.seed)
    table = sec4_application(_floats(args.eps), _ints(args.n), args.seed, args.dim, quad=quad)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(table.to_csv())
    _emit(table.to_dict(), args)
    return 0 if table.all_rows_pass else 1


def cmd_study(args):
    cfg = ExperimentConfig.load(args.config)
    fit = tuple(_ints(args.fit_range)) if args.fit_range else None
    fits = convergence_study(cfg, fit, tuple(args.series.split(",")))
    _emit({k: v.to_dict() for k, v in fits.items()}, args)
    return 0


# ------------------------------------------------------------- parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("--samples", type=int, default=1 << 16, help="Monte Carlo budget for volumes and integrals")

    p = argparse.ArgumentParser(prog="khcert", description="Quadrature error bounds via discrepancy and variation.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a point set as CSV")
    g.add_argument("--kind", choices=["halton", "kronecker", "random", "fibonacci"], default="halton")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--dim", type=int, default=2)
    g.add_argument("--alphas", help="comma-separated Kronecker directions")
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("disc", parents=[common], help="discrepancy of a point set")
    d.add_argument("--points", required=True)
    d.add_argument("--kind", choices=["star", "intersect", "intersection", "lq", "cube", "ball"], default="star")
    d.add_argument("--region", default="full")
    d.add_argument("--q", type=float, default=2.0)
    d.add_argument("--a", type=float, default=GOLDEN_SIDE)
    d.add_argument("--r", type=float, default=0.25)
    d.add_argument("--mx", type=int, default=4096)
    d.add_argument("--mt", type=int, default=256)
    d.add_argument("--starts", type=int, default=32)
    d.set_defaults(func=cmd_disc)

    v = sub.add_parser("var", parents=[common], help="L^p variation of a named integrand")
    v.add_argument("--integrand", choices=NAMES, default="exp-sum")
    v.add_argument("--dim", type=int, default=2)
    v.add_argument("--p", type=float, default=1.0)
    v.add_argument("--region", help="restrict to a region instead of the torus")
    v.add_argument("--grid", type=int, default=128)
    v.set_defaults(func=cmd_var)

    y = sub.add_parser("verify", parents=[common], help="check the error bound")
    y.add_argument("--config", help="experiment config (JSON)")
    y.add_argument("--matrix", action="store_true", help="run the default acceptance matrix")
    y.add_argument("--integrand", choices=NAMES, default="exp-sum")
    y.add_argument("--dim", type=int, default=2)
    y.add_argument("--region", default="full")
    y.add_argument("--points", help="CSV point file (otherwise --generator/--n)")
    y.add_argument("--generator", choices=["halton", "kronecker", "random"], default="halton")
    y.add_argument("--n", type=int)
    y.add_argument("--variant", choices=["thm1", "thm8", "thm10"], default="thm1")
    y.add_argument("--p", type=float, default=1.0)
    y.add_argument("--q", type=float, default=math.inf)
    y.add_argument("--a", type=float, default=GOLDEN_SIDE)
    y.add_argument("--r", type=float, help="ball radius (default: from the Bessel scan)")
    y.add_argument("--gamma", type=float)
    y.add_argument("--beta", type=float, default=1.3)
    y.add_argument("--mx", type=int, default=4096)
    y.add_argument("--mt", type=int, default=256)
    y.add_argument("--starts", type=int, default=32)
    y.add_argument("--slack", type=float, default=0.05)
    y.add_argument("--jsonl", help="append reports to this JSON-lines file")
    y.set_defaults(func=cmd_verify)

    s = sub.add_parser("sphere", parents=[common], help="cap-discrepancy bound on the sphere")
    s.add_argument("--points", required=True)
    s.add_argument("--region", default="hemisphere", help="hemisphere, full or cap:<theta>")
    s.add_argument("--theta", type=float, default=1.0)
    s.add_argument("--variant", choices=["single", "pair"], default="pair")
    s.add_argument("--gamma", type=float, default=2.6)
    s.add_argument("--coeffs", default="0.2,0.3,0.2,0.1,0.05", help="zonal coefficients c_0,c_1,...")
    s.add_argument("--nmax", type=int, help="also report the growth of 1/coefficients up to nmax")
    s.add_argument("--mx", type=int, default=4096)
    s.add_argument("--slack", type=float, default=0.05)
    s.set_defaults(func=cmd_sphere)

    b = sub.add_parser("scan-bessel", parents=[common], help="choose a radius keeping J_alpha away from 0")
    b.add_argument("--alpha", type=float, default=1.0)
    b.add_argument("--lo", type=float, default=1.0)
    b.add_argument("--hi", type=float, default=2.0)
    b.add_argument("--beta", type=float, default=1.3)
    b.add_argument("--kmax", type=int, default=10_000)
    b.add_argument("--grid", type=int, default=512)
    b.set_defaults(func=cmd_scan)

    e = sub.add_parser("sec4", parents=[common], help="singular integrand on shrinking simplices")
    e.add_argument("--eps", default="0.1,0.05,0.025")
    e.add_argument("--n", default="256,1024,4096")
    e.add_argument("--dim", type=int, default=2)
    e.add_argument("--csv", help="also write the table as CSV")
    e.set_defaults(func=cmd_sec4)

    t = sub.add_parser("study", parents=[common], help="log-log convergence slopes over an N ladder")
    t.add_argument("--config", required=True)
    t.add_argument("--series", default="lhs,discrepancy", help="any of lhs, discrepancy, star")
    t.add_argument("--fit-range", help="lo,hi bounds on N for the fit")
    t.set_defaults(func=cmd_study)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (KHError, OSError, ValueError, argparse.ArgumentTypeError) as exc:
        print(f"khcert {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
