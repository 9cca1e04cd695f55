"""``faso`` command-line front end.

Exit status: 0 on success, 1 for any diagnostic (missing file, syntax or
validation errors, unsupported programs), 2 when the grounding budget is
exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from .generator import NotStratified, UnsupportedFragment
from .grounder import DEFAULT_BUDGET, BudgetExceeded, GroundingError
from .parser import ParseError, parse_program, print_program
from .preference import STRATEGIES
from .solve import InvalidProgram, report_benefits, solve
from .syntax import EPSILON

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_BUDGET = 2


def model_json(model) -> dict:
    return {
        "index": model.index,
        "literals": {str(lit): round(g, 9) for lit, g in model.items()},
    }


def report_json(solution) -> dict:
    return {
        "models": [model_json(m) for m in solution.models],
        "optimal": list(solution.ranking.optimal),
        "strategy": solution.ranking.strategy,
        "warnings": list(solution.warnings),
    }


def format_model(model) -> str:
    body = ", ".join(f"{lit}: {g:.2f}" for lit, g in model.items())
    return f"I{model.index} = {{{body}}}"


def format_report(solution) -> str:
    lines = [f"{len(solution.models)} models"]
    lines.append(f"strategy: {solution.ranking.strategy}")
    lines.append("optimal: " + (", ".join(f"I{i}" for i in solution.ranking.optimal) or "none"))
    for m in solution.optimal:
        lines.append("  " + format_model(m))
    for w in solution.warnings:
        lines.append(f"warning: {w}")
    t = solution.timings
    lines.append("time: " + ", ".join(f"{k} {v:.3f}s" for k, v in t.items()))
    return "\n".join(lines)


def format_benefits(model) -> str:
    b = report_benefits(model)
    if b is None:
        return f"water report: I{model.index} has no objective literal, skipped"
    x = ", ".join(f"{v:g}" for v in b.x)
    parts = [f"water report for I{model.index}: x=({x})"]
    if b.total is not None:
        parts.append(f"T={b.total:.2f}")
    parts.append(f"D_g={b.objective_degree:.2f}")
    if b.constraint_degree is not None:
        parts.append(f"D_c={b.constraint_degree:.2f}")
    return " ".join(parts)


class _ArgumentParser(argparse.ArgumentParser):
    # usage errors are diagnostics; keep status 2 for budget aborts
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_DIAGNOSTICS, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _ArgumentParser(prog="faso", description="Fuzzy answer set optimization solver.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    s = sub.add_parser("solve", help="generate and rank the fuzzy answer sets of a program")
    s.add_argument("file")
    s.add_argument("--strategy", choices=STRATEGIES, default="pareto")
    s.add_argument("--json", action="store_true", help="print the report as JSON")
    s.add_argument("--epsilon", type=float, default=None,
                   help=f"grade comparison tolerance (default $FASO_EPSILON or {EPSILON})")
    s.add_argument("--max-models", type=int, default=None)
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="maximum ground instances")
    s.add_argument("--dump-ground", action="store_true", help="print the ground program")
    s.add_argument("--dump-models", action="store_true", help="print every answer set as JSON")
    s.add_argument("--water-report", action="store_true",
                   help="decode T(X), D_g and D_c from the optimal answer sets")
    return ap


def _epsilon(value: Optional[float]) -> float:
    if value is not None:
        return value
    env = os.environ.get("FASO_EPSILON")
    if env:
        try:
            return float(env)
        except ValueError:
            raise SystemExit(f"faso: FASO_EPSILON is not a number: {env!r}")
    return EPSILON


def _solve_command(args, out, err) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError:
        print(f"faso: file not found: {args.file}", file=err)
        return EXIT_DIAGNOSTICS
    except OSError as exc:
        print(f"faso: cannot read {args.file}: {exc.strerror}", file=err)
        return EXIT_DIAGNOSTICS
    try:
        program = parse_program(text, args.file)
        solution = solve(program, strategy=args.strategy, epsilon=_epsilon(args.epsilon),
                         max_models=args.max_models, budget=args.budget)
    except (ParseError, InvalidProgram) as exc:
        for d in exc.diagnostics:
            print(d, file=err)
        return EXIT_DIAGNOSTICS
    except BudgetExceeded as exc:
        print(f"faso: grounding budget exceeded: {exc}", file=err)
        return EXIT_BUDGET
    except GroundingError as exc:
        print(f"faso: grounding failed: {exc}", file=err)
        return EXIT_DIAGNOSTICS
    except UnsupportedFragment as exc:
        print(f"faso: unsupported program: {exc}", file=err)
        return EXIT_DIAGNOSTICS
    except NotStratified as exc:
        print(f"faso: program is not stratified: {exc}", file=err)
        return EXIT_DIAGNOSTICS

    side = err if args.json else out
    if args.dump_ground:
        print(print_program(solution.ground), end="", file=side)
    if args.dump_models:
        for m in solution.models:
            print(json.dumps(model_json(m)), file=side)
    if args.json:
        print(json.dumps(report_json(solution), indent=2), file=out)
    else:
        print(format_report(solution), file=out)
    if args.water_report:
        for m in solution.optimal:
            print(format_benefits(m), file=side)
    return EXIT_OK


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    """Execute the command line ``argv`` and return the exit status."""
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    if args.command == "solve":
        return _solve_command(args, out, err)
    return EXIT_DIAGNOSTICS  # pragma: no cover


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
