"""Command-line entry point: ``d2dhop {verify,table,trace,partition,simulate}``.

Exit codes: 0 success / all checks pass, 1 a property violation was found,
2 invalid input.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from . import serialize
from .grid import GridShape, Resource
from .patterns import PARAM_NAMES, Family, PatternError, PatternSpec, make_pattern
from .sim import ScenarioError, run
from .verifier import all_passed, feature_table, verify_all

EXIT_OK, EXIT_VIOLATION, EXIT_INVALID = 0, 1, 2

# Flags expected from each row of the comparison table, in column order
# (time hopping, frequency hopping, independent of t, has invariant).
REFERENCE_TABLE = {
    "QC(c≡0)": ("Y", "N", "Y", "Y"),
    "QC(c≢0)": ("Y", "Y", "N", "N"),
    "type A1": ("Y", "Y", "Y", "Y"),
    "type A2": ("Y", "Y", "Y", "Y"),
    "type B1": ("Y", "Y", "Y", "Y"),
    "type B2": ("Y", "Y", "Y", "Y"),
}


class UsageError(Exception):
    pass


def _add_pattern_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", required=True, type=str.upper,
                   choices=[f.value for f in Family], metavar="{qc,a1,a2,b1,b2}")
    p.add_argument("--m", type=int, required=True, help="frequency channels")
    p.add_argument("--n", type=int, required=True, help="subframes per discovery frame")
    for name in ("c", "u", "v", "e", "f"):
        p.add_argument(f"--{name}", type=int)


def _pattern_from_args(args):
    fam = Family(args.family)
    params = {}
    for name in ("c", "u", "v", "e", "f"):
        val = getattr(args, name)
        if val is None:
            continue
        if name not in PARAM_NAMES[fam]:
            raise UsageError(f"--{name} is not a parameter of {fam.value}")
        params[name] = val
    try:
        shape = GridShape(args.m, args.n)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    return make_pattern(PatternSpec(fam, shape, params))


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt_res(xy) -> str:
    return f"({xy[0]},{xy[1]})"


def cmd_verify(args) -> int:
    pattern = _pattern_from_args(args)
    if args.frames is not None and args.frames < 1:
        raise UsageError("--frames must be >= 1")
    reports = verify_all(pattern, args.frames)
    ok = all_passed(reports)
    if args.format == "json":
        _emit(serialize.dumps(serialize.reports_doc(pattern, reports)), args.out)
    else:
        lines = [repr(pattern)]
        for r in reports:
            line = f"  {r.name:<20} {r.status:<5} checked={r.checked}"
            if "moving_fraction" in r.details:
                line += f" moving={r.details['moving_fraction']}"
            if r.counterexample:
                cx = ", ".join(f"{k}={v}" for k, v in r.counterexample.items())
                line += f"  counterexample: {cx}"
            lines.append(line)
        lines.append("ALL PASS" if ok else "VIOLATION")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_table(args) -> int:
    m, n = args.m, args.n
    if m < 3 or m % 2 == 0 or n < 1 or n % m:
        raise UsageError("table needs m odd, m >= 3 and m dividing n")
    try:
        shape = GridShape(m, n)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    rows = feature_table(shape, frames=args.frames)
    matches = all(REFERENCE_TABLE[r.label] == r.flags for r in rows)
    if args.format == "json":
        doc = {"m": m, "n": n, "matches_reference": matches, "rows": serialize.table_rows(rows)}
        _emit(serialize.dumps(doc), args.out)
    else:
        head = f"{'pattern':<10} {'time hop':>8} {'freq hop':>8} {'indep t':>8} {'invariant':>9}"
        lines = [head, "-" * len(head)]
        for r in rows:
            lines.append(f"{r.label:<10} {r.time_hopping:>8} {r.frequency_hopping:>8} "
                         f"{r.independent_of_t:>8} {r.has_invariant:>9}")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if matches else EXIT_VIOLATION


def _parse_start(text: str) -> Resource:
    try:
        i, j = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--start must look like 'i,j', got {text!r}") from None
    return Resource(i, j)


def cmd_trace(args) -> int:
    pattern = _pattern_from_args(args)
    start = _parse_start(args.start)
    if args.frames < 0:
        raise UsageError("--frames must be >= 0")
    pattern.check_domain(start)
    rows = serialize.trace_rows(pattern, start, args.frames)
    if args.format == "json":
        _emit(serialize.dumps(rows), args.out)
    else:
        _emit(serialize.trace_csv(rows), args.out)
    return EXIT_OK


def cmd_partition(args) -> int:
    pattern = _pattern_from_args(args)
    rows = serialize.partition_rows(pattern)
    if args.format == "json":
        _emit(serialize.dumps(rows), args.out)
    else:
        lines = [f"{len(rows)} classes over {pattern.domain_size} resources"]
        for r in rows:
            members = " ".join(_fmt_res(x) for x in r["members"])
            lines.append(f"{r['value']} mod {r['modulus']}  size={r['size']}  {members}")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    scenario = serialize.load_scenario(args.config)
    result = run(scenario)
    if args.format == "csv":
        text = serialize.cdf_csv(result)
    else:
        text = serialize.dumps(serialize.result_to_dict(scenario, result))
    _emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="d2dhop", description="Hopping patterns for D2D discovery.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="exhaustively check a pattern's properties")
    _add_pattern_flags(p)
    p.add_argument("--frames", type=int, help="frames checked for frame-dependent maps (default 2*lcm(m,n))")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("table", help="feature comparison table for all families")
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--frames", type=int)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("trace", help="trajectory of one logical resource")
    _add_pattern_flags(p)
    p.add_argument("--start", required=True, help="frame-0 position 'i,j'")
    p.add_argument("--frames", type=int, default=8)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("partition", help="invariant classes of a pattern")
    _add_pattern_flags(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("simulate", help="run a discovery scenario file")
    p.add_argument("--config", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, PatternError, ScenarioError, serialize.ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, TypeError, KeyError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
