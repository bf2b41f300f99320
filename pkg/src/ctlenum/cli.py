"""Command-line front end.

Exit codes: 0 command evaluated (whatever the answer), 2 parse or
validation error, 3 oracle/fragment mismatch, 4 trim inapplicable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import formula as F
from .enumeration import (
    EnumerationStats,
    OracleKind,
    brute_force_enumerate,
    enumerate_submodels,
    exists_submodel,
)
from .errors import (
    CapExceeded,
    FormulaSyntaxError,
    InvalidModelError,
    ModelFormatError,
    NotAFAGChain,
    OracleFragmentMismatch,
)
from .kripke import canonical_serialize, load_model, require_valid, save_model
from .modelcheck import check
from .reductions import REDUCTIONS, load_digraph


def _add_formula_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--formula", help="formula text")
    group.add_argument("--formula-file", help="path to a formula text file")


def _read_formula(args: argparse.Namespace) -> F.Formula:
    if args.formula is not None:
        text = args.formula
    else:
        with open(args.formula_file, encoding="utf-8") as fh:
            text = fh.read()
    return F.parse_formula(text)


def _read_model(args: argparse.Namespace):
    model = load_model(args.model)
    require_valid(model)
    return model


def cmd_check(args: argparse.Namespace) -> int:
    model = _read_model(args)
    phi = _read_formula(args)
    print("true" if check(model, phi) else "false")
    return 0


def cmd_exists(args: argparse.Namespace) -> int:
    model = _read_model(args)
    phi = _read_formula(args)
    print("true" if exists_submodel(model, phi) else "false")
    return 0


def cmd_enumerate(args: argparse.Namespace) -> int:
    model = _read_model(args)
    phi = _read_formula(args)
    connected = not args.include_disconnected
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        if args.oracle == "brute":
            stats = _emit_brute(out, model, phi, connected, args)
        else:
            session = enumerate_submodels(
                model,
                phi,
                oracle=OracleKind(args.oracle),
                connected=connected,
                limit=args.limit,
            )
            for solution in session:
                out.write(canonical_serialize(solution) + "\n")
                out.flush()
            stats = session.stats
        if args.stats:
            out.write(json.dumps(stats.to_dict()) + "\n")
            out.flush()
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _emit_brute(out, model, phi, connected, args) -> EnumerationStats:
    stats = EnumerationStats()
    last = time.perf_counter_ns()
    solutions = brute_force_enumerate(model, phi, connected=connected, cap=args.cap)
    lines = sorted(canonical_serialize(s) for s in solutions)
    if args.limit is not None:
        lines = lines[: args.limit]
    for line in lines:
        now = time.perf_counter_ns()
        stats.delays_ns.append(now - last)
        stats.oracle_calls.append(0)
        stats.solutions += 1
        out.write(line + "\n")
        out.flush()
        last = time.perf_counter_ns()
    stats.delays_ns.append(time.perf_counter_ns() - last)
    stats.oracle_calls.append(0)
    return stats


def cmd_trim(args: argparse.Namespace) -> int:
    phi = _read_formula(args)
    trimmed = F.afag_trim(phi)
    print(F.render_formula(trimmed.to_formula()))
    return 0


def cmd_reduce(args: argparse.Namespace) -> int:
    if args.kind == "sat-ag":
        if args.formula is None and args.formula_file is None:
            print("reduce sat-ag needs --formula or --formula-file", file=sys.stderr)
            return 2
        phi = _read_formula(args)
        instance = REDUCTIONS["sat-ag"](phi, encoding=args.encoding)
    else:
        if args.digraph is None:
            print(f"reduce {args.kind} needs --digraph", file=sys.stderr)
            return 2
        digraph = load_digraph(args.digraph)
        instance = REDUCTIONS[args.kind](digraph)
    os.makedirs(args.out, exist_ok=True)
    model_path = os.path.join(args.out, "model.json")
    formula_path = os.path.join(args.out, "formula.txt")
    provenance_path = os.path.join(args.out, "provenance.json")
    save_model(instance.model, model_path)
    with open(formula_path, "w", encoding="utf-8") as fh:
        fh.write(F.render_formula(instance.formula) + "\n")
    with open(provenance_path, "w", encoding="utf-8") as fh:
        json.dump(instance.provenance, fh, indent=2)
        fh.write("\n")
    for path in (model_path, formula_path, provenance_path):
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctlenum",
        description="Enumerate, check and generate CTL submodel instances.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="model-check a formula at the root")
    p_check.add_argument("--model", required=True)
    _add_formula_args(p_check)
    p_check.set_defaults(func=cmd_check)

    p_exists = sub.add_parser("exists", help="does any satisfying submodel exist")
    p_exists.add_argument("--model", required=True)
    _add_formula_args(p_exists)
    p_exists.set_defaults(func=cmd_exists)

    p_enum = sub.add_parser("enumerate", help="stream all satisfying submodels")
    p_enum.add_argument("--model", required=True)
    _add_formula_args(p_enum)
    p_enum.add_argument(
        "--oracle",
        choices=["auto", "exhaustive", "monotone", "afag", "brute"],
        default="auto",
    )
    p_enum.add_argument("--limit", type=int)
    p_enum.add_argument("--stats", action="store_true")
    p_enum.add_argument("--include-disconnected", action="store_true")
    p_enum.add_argument("--out", help="write the stream to a file")
    p_enum.add_argument("--cap", type=int, default=20, help="brute-force ground cap")
    p_enum.set_defaults(func=cmd_enumerate)

    p_trim = sub.add_parser("trim", help="normalize an AF/AG chain")
    _add_formula_args(p_trim)
    p_trim.set_defaults(func=cmd_trim)

    p_reduce = sub.add_parser("reduce", help="materialize a hardness instance")
    p_reduce.add_argument(
        "kind",
        choices=["sat-ag", "hampath-af", "hampath-ax", "hampath-au", "hampath-ar"],
    )
    p_reduce.add_argument("--formula")
    p_reduce.add_argument("--formula-file")
    p_reduce.add_argument("--digraph")
    p_reduce.add_argument("--encoding", choices=["negation", "relabel"], default="negation")
    p_reduce.add_argument("--out", default=".")
    p_reduce.set_defaults(func=cmd_reduce)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FormulaSyntaxError, ModelFormatError, InvalidModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OracleFragmentMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NotAFAGChain as exc:
        print(f"error: not an AF/AG chain: {exc}", file=sys.stderr)
        return 4
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
