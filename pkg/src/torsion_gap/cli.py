"""Command-line entry point: solve a single problem, sweep a hole-radius
ladder, or run the verification suites.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 solver
failure.
"""
from __future__ import annotations

import argparse
import json
import sys
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from .geometry import PuncturedDomain, parse_domain, parse_hole
from .harness import (SweepConfig, emit, parse_eps_ladder, sweep, verify)
from .mfs import DEFAULT_CONFIG, IllPosedConfiguration, MfsConfig
from .torsion import (MaximumNotFound, find_critical_points, select_maximum,
                      solve_torsion, solve_torsion_punctured)

__all__ = ["main"]

USAGE_ERROR, SOLVER_ERROR = 2, 3


def _mfs_from_args(args) -> MfsConfig:
    kwargs = {}
    for name in ("n_outer_sources", "n_hole_sources", "svd_cutoff"):
        v = getattr(args, name, None)
        if v is not None:
            kwargs[name] = v
    return MfsConfig(**kwargs) if kwargs else DEFAULT_CONFIG


def _add_mfs_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n-outer-sources", type=int, dest="n_outer_sources")
    p.add_argument("--n-hole-sources", type=int, dest="n_hole_sources")
    p.add_argument("--svd-cutoff", type=float, dest="svd_cutoff")


def _apply_config_file(args, parser) -> None:
    """Merge a TOML config file (same keys as the long flags, dashes or
    underscores) into args; explicit flags win."""
    if not getattr(args, "config", None):
        return
    try:
        with open(args.config, "rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as e:
        parser.error(f"cannot read config file: {e}")
    for key, value in data.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            parser.error(f"unknown config key: {key!r}")
        if getattr(args, attr) is None:
            setattr(args, attr, value)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torsion-gap",
        description="Torsion problem on convex domains with a small hole.")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="solve one torsion problem and report "
                                      "the maximum point and its Hessian")
    ps.add_argument("--domain", help="e.g. disk:R=1 or ellipse:a=2,b=1")
    ps.add_argument("--hole", help="e.g. x=0,y=0,eps=1e-4 (omit for no hole)")
    ps.add_argument("--out", help="write the JSON report here (default stdout)")
    ps.add_argument("--config", help="TOML file with the same keys as the flags")
    _add_mfs_flags(ps)

    pw = sub.add_parser("sweep", help="solve along a hole-radius ladder and "
                                      "write one row per epsilon")
    pw.add_argument("--domain")
    pw.add_argument("--hole-center", dest="hole_center", help="e.g. 0,0")
    pw.add_argument("--eps", help="ladder, e.g. 1e-2..1e-8/2 or 1e-2,1e-3")
    pw.add_argument("--csv", help="output CSV path")
    pw.add_argument("--json", help="output JSON path")
    pw.add_argument("--config", help="TOML file with the same keys as the flags")
    _add_mfs_flags(pw)

    pv = sub.add_parser("verify", help="run a named verification suite")
    pv.add_argument("--suite", help="oracles, annulus, ellipse-centered, "
                                    "offcenter, capacity, expansions, "
                                    "counterexample, or all")
    pv.add_argument("--json", help="write the report here as JSON")
    pv.add_argument("--c1", type=float, help="bound constant c1 (default 1)")
    pv.add_argument("--c2", type=float, help="bound constant c2 (default 1)")
    pv.add_argument("--config", help="TOML file with the same keys as the flags")
    _add_mfs_flags(pv)
    return parser


def _cmd_solve(args, parser) -> int:
    if not args.domain:
        parser.error("solve requires --domain")
    try:
        base = parse_domain(args.domain)
    except (ValueError, KeyError) as e:
        parser.error(f"bad --domain: {e}")
    mfs = _mfs_from_args(args)
    try:
        if args.hole:
            center, eps = parse_hole(args.hole)
            d = PuncturedDomain(base, center, eps)
            u = solve_torsion_punctured(d, mfs)
        else:
            d = base
            u = solve_torsion(base, mfs)
        top = select_maximum(find_critical_points(u))
    except (ValueError, KeyError) as e:
        parser.error(f"bad --hole: {e}")
    except (IllPosedConfiguration, MaximumNotFound) as e:
        print(f"solver failure: {e}", file=sys.stderr)
        return SOLVER_ERROR
    report = {
        "domain": args.domain,
        "hole": args.hole,
        "status": u.status,
        "boundary_residual": u.certificate,
        "max_point": [float(v) for v in top.location],
        "max_value": float(top.value),
        "gradient_residual": float(np.hypot(*u.gradient(top.location))),
        "eigenvalues": [float(v) for v in top.eigenvalues],
        "eigenvectors": np.asarray(top.eigenvectors).T.tolist(),
        "diam_inrad": d.diameter() / d.inradius(),
    }
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if u.status == "converged" else SOLVER_ERROR


def _cmd_sweep(args, parser) -> int:
    for flag in ("domain", "hole_center", "eps"):
        if getattr(args, flag) is None:
            parser.error(f"sweep requires --{flag.replace('_', '-')}")
    if not args.csv and not args.json:
        parser.error("sweep requires --csv or --json")
    try:
        base = parse_domain(args.domain)
        center = np.array([float(v) for v in args.hole_center.split(",")])
        eps_values = parse_eps_ladder(args.eps)
        cfg = SweepConfig(domain=base, hole_center=center,
                          eps_values=eps_values, mfs=_mfs_from_args(args))
    except (ValueError, KeyError) as e:
        parser.error(str(e))
    try:
        rows = sweep(cfg)
    except (IllPosedConfiguration, MaximumNotFound) as e:
        print(f"solver failure: {e}", file=sys.stderr)
        return SOLVER_ERROR
    if args.csv:
        emit(rows, "csv", args.csv)
    if args.json:
        emit(rows, "json", args.json)
    n_flagged = sum(r.flagged for r in rows)
    if n_flagged:
        print(f"warning: {n_flagged}/{len(rows)} rows flagged as unconverged",
              file=sys.stderr)
    return SOLVER_ERROR if n_flagged == len(rows) else 0


def _cmd_verify(args, parser) -> int:
    if not args.suite:
        parser.error("verify requires --suite")
    try:
        report = verify(args.suite, mfs=_mfs_from_args(args),
                        c1=args.c1 if args.c1 is not None else 1.0,
                        c2=args.c2 if args.c2 is not None else 1.0)
    except ValueError as e:
        parser.error(str(e))
    for c in report["criteria"]:
        verdict = "PASS" if c["passed"] else "FAIL"
        print(f"{verdict}  {c['name']}: measured={c['measured']:.6g} "
              f"threshold={c['threshold']:.6g}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    return 0 if report["passed"] else 1


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    _apply_config_file(args, parser)
    handlers = {"solve": _cmd_solve, "sweep": _cmd_sweep, "verify": _cmd_verify}
    return handlers[args.command](args, parser)


if __name__ == "__main__":
    sys.exit(main())
