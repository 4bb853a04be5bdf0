"""Command-line entry point: ``hopfroots <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .degree import compute_degree
from .errors import HopfRootsError
from .linking import hopf_report
from .maps import GRAMMAR, build_class_map, parse_map
from .report import RunConfig, export_curves, run_suite
from .roots import rp2_root_decompose, root_set_report
from .tracer import find_root_components


def _vector(text: str):
    try:
        return np.array([float(v) for v in text.replace(" ", "").split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="base seed for all sampling (default 0)")
    common.add_argument("--seeds", type=int, default=None, help="multistart seeds for root tracing (default 200)")
    common.add_argument("--step", type=float, default=None, help="continuation step length (default 0.01)")
    common.add_argument("--out", default=None, help="output directory or file (default hopfroots-out)")
    common.add_argument("--config", default=None, help="JSON file with the same keys as the flags")

    parser = argparse.ArgumentParser(
        prog="hopfroots",
        description="Degrees, Hopf invariants and root sets of maps between spheres and projective spaces.",
        epilog="map expressions:\n" + GRAMMAR,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("degree", parents=[common], help="signed degree of a map into S3 or RP3")
    p.add_argument("expr")
    p = sub.add_parser("hopf", parents=[common], help="Hopf invariant of a map into S2")
    p.add_argument("expr")
    p = sub.add_parser("roots", parents=[common], help="root set of the minimal class-n representative")
    p.add_argument("domain", choices=["S3", "RP3"])
    p.add_argument("target", choices=["S2", "RP2"])
    p.add_argument("n", type=int)
    p = sub.add_parser("classify", parents=[common], help="Hopf invariants of h'_n o p3 for nmin..nmax")
    p.add_argument("nmin", type=int)
    p.add_argument("nmax", type=int)
    p = sub.add_parser("suite", parents=[common], help="run the paper or quick verification suite")
    p.add_argument("suite", choices=["paper", "quick"])
    p = sub.add_parser("export", parents=[common], help="trace f^-1(y) and write the curves as CSV")
    p.add_argument("expr")
    p.add_argument("y", type=_vector, help="target point, e.g. 0,0,1")
    return parser


def _config(args) -> RunConfig:
    flags = {"seed": args.seed, "seeds": args.seeds, "step": args.step, "out": args.out}
    if args.config:
        return RunConfig.from_file(args.config, **flags)
    return RunConfig(**{k: v for k, v in flags.items() if v is not None})


def _emit(pairs: dict):
    print(" ".join(f"{k}={json.dumps(v) if isinstance(v, str) and ' ' in v else v}" for k, v in pairs.items()))


def _cmd_degree(args, cfg):
    f = parse_map(args.expr)
    _emit({"expr": f.expr, "degree": compute_degree(f, cfg.degree)})
    return 0


def _cmd_hopf(args, cfg):
    f = parse_map(args.expr)
    rep = hopf_report(f, cfg=cfg.trace, seed=cfg.seed)
    _emit({
        "expr": f.expr,
        "hopf": rep.value,
        "residual": f"{rep.max_residual:.3g}",
        "methods_agree": rep.methods_agree,
        "attempts": rep.attempts,
    })
    if rep.diagnostic:
        _emit({"diagnostic": rep.diagnostic})
    return 0


def _cmd_roots(args, cfg):
    f = build_class_map(args.target, args.domain, args.n)
    rep = root_set_report(f, [0.0, 0.0, 1.0], cfg.trace, map_id=(args.domain, args.target, args.n))
    _emit({"expr": f.expr, "components": rep.component_count, "closed_loop": rep.closed_loop_present})
    for c in rep.components:
        _emit(c.as_dict())
    if args.out and rep.components:
        path = export_curves(rep.curves, Path(args.out) / f"roots_{args.domain}_{args.target}_{args.n}.csv")
        _emit({"csv": str(path)})
    return 0


def _cmd_classify(args, cfg):
    failed = 0
    for n in range(args.nmin, args.nmax + 1):
        f = build_class_map("S2", "RP3", n)
        value = hopf_report(f, cfg=cfg.trace, seed=cfg.seed, crosscheck=False).value
        failed += value != n
        _emit({"n": n, "hopf": value, "pass": str(value == n).lower()})
    return 1 if failed else 0


def _cmd_suite(args, cfg):
    result = run_suite(args.suite, cfg)
    for r in result.records:
        print(r.line())
    for r in result.failures():
        print(f"FAILED {r.id}: {r.claim} (expected {r.expected}, observed {r.observed})", file=sys.stderr)
    _emit({"suite": args.suite, "records": len(result.records), "failed": len(result.failures()), "out": cfg.out})
    return result.exit_status


def _cmd_export(args, cfg):
    f = parse_map(args.expr)
    if f.target == "RP2":
        plus, minus = rp2_root_decompose(f, args.y, cfg.trace)
        curves = plus.curves + minus.curves
    else:
        curves = find_root_components(f, args.y, cfg.trace)
    if not curves:
        _emit({"expr": f.expr, "components": 0})
        return 0
    path = Path(args.out) if args.out and args.out.endswith(".csv") else Path(cfg.out) / "curves.csv"
    export_curves(curves, path)
    _emit({"expr": f.expr, "components": len(curves), "csv": str(path)})
    return 0


COMMANDS = {
    "degree": _cmd_degree,
    "hopf": _cmd_hopf,
    "roots": _cmd_roots,
    "classify": _cmd_classify,
    "suite": _cmd_suite,
    "export": _cmd_export,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except HopfRootsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
