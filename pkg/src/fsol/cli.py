"""Command-line front end: ``fsol check | run | diff | fuzz``."""

from __future__ import annotations

import argparse
import json
import sys
from collections import defaultdict
from typing import List, Optional, Sequence, Tuple

from .checker import CHECKERS
from .diagnostics import Diagnostic, DiagnosticError, errors_only, render_json, render_text
from .scenario import (
    EXIT_OK, EXIT_TYPE_ERRORS, EXIT_USAGE, load_scenario, run_scenario, validate_entry_constraints,
)
from .syntax import ast as A
from .syntax.hierarchy import ContractTable, build_table
from .syntax.parser import parse_program

TYPINGS = ("baseline", "refined")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def front_end(path: str) -> Tuple[A.Program, ContractTable, List[Diagnostic]]:
    """Parse and resolve ``path``; diagnostics cover both stages."""
    program, diags = parse_program(_read(path), path)
    if diags:
        return program, None, diags
    table, rdiags = build_table(program)
    return program, table, rdiags


def _emit(diags: Sequence[Diagnostic], fmt: str, out=None) -> None:
    out = out or sys.stdout
    out.write(render_json(diags) if fmt == "json" else render_text(diags))


def _summary(diags: Sequence[Diagnostic]) -> str:
    n = len(errors_only(diags))
    return f"{n} error{'s' if n != 1 else ''}"


# ---------------------------------------------------------------- commands


def cmd_check(args) -> int:
    program, table, diags = front_end(args.file)
    if table is not None and not diags:
        diags = CHECKERS[args.typing](program, table)
    _emit(diags, args.format)
    if args.format == "text":
        print(f"{args.file}: {args.typing}: {_summary(diags)}", file=sys.stderr)
    return EXIT_TYPE_ERRORS if errors_only(diags) else EXIT_OK


def cmd_run(args) -> int:
    program, table, diags = front_end(args.file)
    if table is None or diags:
        _emit(diags, "text", sys.stderr)
        return EXIT_TYPE_ERRORS
    diags = errors_only(CHECKERS[args.typing](program, table))
    if diags:
        _emit(diags, "text", sys.stderr)
        if not args.force:
            print(f"{args.file}: {args.typing}: {_summary(diags)}; not running (use --force)", file=sys.stderr)
            return EXIT_TYPE_ERRORS
        print(f"{args.file}: running despite {_summary(diags)} (--force)", file=sys.stderr)
    try:
        sc = load_scenario(args.scenario, table)
    except OSError as exc:
        raise UsageError(f"cannot read {args.scenario}: {exc}") from exc
    except DiagnosticError as exc:
        _emit(exc.diagnostics, "text", sys.stderr)
        return EXIT_USAGE
    entry = validate_entry_constraints(sc, program, table, args.typing, args.scenario)
    if entry:
        _emit(entry, "text", sys.stderr)
        if not args.force:
            return EXIT_TYPE_ERRORS
    report = run_scenario(program, table, sc, args.typing, args.scenario)
    if args.trace:
        try:
            with open(args.trace, "w", encoding="utf-8") as fh:
                fh.write(report.trace_jsonl())
        except OSError as exc:
            raise UsageError(f"cannot write {args.trace}: {exc}") from exc
    if args.format == "json":
        print(json.dumps(report.to_json(), indent=2, sort_keys=True))
    else:
        sys.stdout.write(report.render_text())
    return report.exit_status


def _rule(code: str) -> str:
    return code.split("-", 1)[1] if "-" in code else code


def _key(d: Diagnostic):
    return (_rule(d.code), d.span.start if d.span is not None else -1)


def cmd_diff(args) -> int:
    program, table, diags = front_end(args.file)
    if table is None or diags:
        _emit(diags, "text", sys.stderr)
        return EXIT_USAGE
    results = {t: errors_only(CHECKERS[t](program, table)) for t in TYPINGS}
    keys = {t: {_key(d) for d in ds} for t, ds in results.items()}
    only = {
        "baseline": [d for d in results["baseline"] if _key(d) not in keys["refined"]],
        "refined": [d for d in results["refined"] if _key(d) not in keys["baseline"]],
    }
    agree = not only["baseline"] and not only["refined"]
    if args.format == "json":
        print(json.dumps({
            "agree": agree,
            "baseline_errors": len(results["baseline"]),
            "refined_errors": len(results["refined"]),
            "only": {t: [d.to_json() for d in ds] for t, ds in only.items()},
        }, indent=2, sort_keys=True))
    else:
        verdict = lambda t: "accepts" if not results[t] else f"rejects ({_summary(results[t])})"
        print(f"baseline {verdict('baseline')}; refined {verdict('refined')}")
        for t in TYPINGS:
            if not only[t]:
                continue
            print(f"{t} only:")
            groups = defaultdict(list)
            for d in only[t]:
                groups[d.code].append(d)
            for code in sorted(groups):
                print(f"  {code} ({len(groups[code])})")
                for d in groups[code]:
                    print(f"    {d.render()}")
        if agree:
            print("no disagreement")
    return EXIT_OK if agree else EXIT_TYPE_ERRORS


def cmd_fuzz(args) -> int:
    from .fuzz import GenConfig, run_campaign

    if args.count < 0 or args.jobs < 1 or args.budget < 0:
        raise UsageError("--count and --budget must be non-negative and --jobs positive")
    cfg = GenConfig(args.seed, args.mode, size_budget=args.budget)
    report = run_campaign(cfg, args.count, jobs=args.jobs, out_dir=args.out)
    if args.format == "json":
        print(json.dumps(report.to_json(), indent=2, sort_keys=True))
    else:
        sys.stdout.write(report.render_text())
        if report.violations:
            print(f"reproducers written to {args.out}/", file=sys.stderr)
    return report.exit_status


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fsol", description="FSol checkers, chain VM and fuzzer.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="type check a program")
    p.add_argument("--typing", choices=TYPINGS, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="check a program, then play a scenario against it")
    p.add_argument("--typing", choices=TYPINGS, required=True)
    p.add_argument("--scenario", required=True)
    p.add_argument("--force", action="store_true", help="run even if the checker rejects")
    p.add_argument("--trace", metavar="PATH", help="write the execution trace as JSON lines")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("file")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("diff", help="compare what the two checkers report")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("file")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("fuzz", help="run a fuzz campaign")
    p.add_argument("--mode", choices=("refined-sound", "baseline-holes"), required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--budget", type=int, default=160, help="size budget per program")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", default="fuzz-out", help="directory for reproducers")
    p.set_defaults(func=cmd_fuzz)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"fsol: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
