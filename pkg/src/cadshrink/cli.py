"""Command-line interface.

Subcommands: shrink, validate, perturb, eval, bench.  Exit codes: 0 on
success, 1 on validation failure, 2 on input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional

from .ast import is_core
from .cost import INFINITE
from .errors import CadShrinkError
from .evaluator import eval_to_core
from .pipeline import Config, PerturbOptions, perturb, shrink, validate
from .sexp import parse, pretty


def _add_engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-iters", type=int, default=30)
    p.add_argument("--max-nodes", type=int, default=100_000)
    p.add_argument("--max-seconds", type=float, default=10.0)
    p.add_argument("--solver-eps", type=float, default=1e-3)
    p.add_argument("--equiv-eps", type=float, default=1e-6)
    p.add_argument("--no-cad-identities", action="store_true")
    p.add_argument("--no-inverse", action="store_true")
    p.add_argument("--seed", type=int, default=0)


def _config(args) -> Config:
    return Config(
        max_iters=args.max_iters,
        max_nodes=args.max_nodes,
        max_seconds=args.max_seconds,
        solver_eps=args.solver_eps,
        equiv_eps=args.equiv_eps,
        cad_rules=not args.no_cad_identities,
        inverse_rules=not args.no_inverse,
        rng_seed=args.seed,
    )


def _read_expr(path: str):
    try:
        return parse(Path(path).read_text())
    except FileNotFoundError:
        raise CadShrinkError(f"no such file: {path}")


def _cmd_shrink(args) -> int:
    expr = _read_expr(args.input)
    cfg = _config(args)
    out, report = shrink(expr, cfg)
    report.validated = validate(eval_to_core(expr), out, cfg.equiv_eps)
    text = pretty(out)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    if args.json:
        Path(args.json).write_text(json.dumps(report.to_json(), indent=2) + "\n")
    return 0 if report.validated else 1


def _cmd_validate(args) -> int:
    inp = eval_to_core(_read_expr(args.input))
    out = _read_expr(args.output)
    ok = validate(inp, out, args.equiv_eps)
    print("equivalent" if ok else "NOT equivalent")
    return 0 if ok else 1


def _cmd_perturb(args) -> int:
    expr = eval_to_core(_read_expr(args.input))
    if not is_core(expr):
        raise CadShrinkError("perturb expects a program that evaluates to Core Caddy")
    opts = PerturbOptions(
        substitute_identities=not args.no_substitute,
        drop_identities=not args.no_drop,
        interchange=not args.no_interchange,
        shuffle_ac=not args.no_shuffle,
        jitter=args.jitter,
    )
    out = perturb(expr, args.seed, opts)
    text = pretty(out)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    return 0


def _cmd_eval(args) -> int:
    expr = _read_expr(args.input)
    print(pretty(eval_to_core(expr)))
    return 0


def _bench_one(item):
    path_str, cfg = item
    expr = eval_to_core(parse(Path(path_str).read_text()))
    out, report = shrink(expr, cfg)
    report.validated = validate(expr, out, cfg.equiv_eps)
    entry = {"file": Path(path_str).name}
    entry.update(report.to_json())
    if report.input_cost and report.input_cost != INFINITE:
        entry["reduction"] = round(1.0 - report.output_cost / report.input_cost, 4)
    return entry


def _cmd_bench(args) -> int:
    files = sorted(Path(args.dir).glob("*.csexp"))
    if not files:
        raise CadShrinkError(f"no .csexp files under {args.dir}")
    cfg = _config(args)
    work = [(str(f), cfg) for f in files]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            entries = list(pool.map(_bench_one, work))
    else:
        entries = [_bench_one(w) for w in work]
    summary = {
        "files": len(entries),
        "validated": sum(bool(e.get("validated")) for e in entries),
        "mean_input_cost": round(sum(e["input_cost"] for e in entries) / len(entries), 2),
        "mean_output_cost": round(sum(e["output_cost"] for e in entries) / len(entries), 2),
        "mean_reduction": round(sum(e.get("reduction", 0.0) for e in entries) / len(entries), 4),
    }
    payload = {"runs": entries, "summary": summary}
    text = json.dumps(payload, indent=2)
    if args.json:
        Path(args.json).write_text(text + "\n")
    else:
        print(text)
    failed = summary["validated"] != summary["files"]
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cadshrink",
        description="Shrink flat CSG expressions into structured CAD programs.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("shrink", help="shrink a flat Core Caddy file")
    p.add_argument("input", metavar="in.csexp")
    p.add_argument("-o", "--output", metavar="out.caddy")
    p.add_argument("--json", metavar="report.json")
    _add_engine_flags(p)
    p.set_defaults(func=_cmd_shrink)

    p = sub.add_parser("validate", help="check a shrunk program against its input")
    p.add_argument("input", metavar="in.csexp")
    p.add_argument("output", metavar="out.caddy")
    p.add_argument("--equiv-eps", type=float, default=1e-6)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("perturb", help="seeded obfuscation of a Core Caddy file")
    p.add_argument("input", metavar="in.csexp")
    p.add_argument("-o", "--output")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--jitter", type=float, default=0.0)
    p.add_argument("--no-substitute", action="store_true")
    p.add_argument("--no-drop", action="store_true")
    p.add_argument("--no-interchange", action="store_true")
    p.add_argument("--no-shuffle", action="store_true")
    p.set_defaults(func=_cmd_perturb)

    p = sub.add_parser("eval", help="evaluate a Caddy program to Core Caddy")
    p.add_argument("input", metavar="in.caddy")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("bench", help="shrink every .csexp in a directory")
    p.add_argument("dir")
    p.add_argument("--json", metavar="report.json")
    p.add_argument("--jobs", type=int, default=1)
    _add_engine_flags(p)
    p.set_defaults(func=_cmd_bench)

    return ap


def cli_main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CadShrinkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
