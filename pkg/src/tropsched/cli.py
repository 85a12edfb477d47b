"""Command-line interface: ``tropsched solve | validate | oracle-check``.

Exit codes: 0 success, 1 infeasible or invalid model, 2 usage error,
3 internal consistency failure (including solver/oracle disagreement).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import fileio
from .errors import (
    ConsistencyError,
    EmptyFamilyError,
    GridTooLargeError,
    InfeasibleError,
    ModelError,
    OutOfBoundsError,
    ProjectFileError,
    TropicalError,
)
from .oracle import GridSpec, brute_force_minimum, default_grid
from .scheduling import (
    REQUIRED_VECTORS,
    Problem,
    ValidationReport,
    aggregate_precedence,
    instantiate,
    solve,
    validate,
)
from .matrix import tr_fn
from .semifield import TOL

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

PROBLEMS = [p.value for p in Problem]


class UsageError(Exception):
    pass


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, data: bytes) -> None:
    if path in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _load(path: str):
    data = _read(path)
    try:
        return fileio.parse_project(data)
    except ProjectFileError:
        raise
    except ValueError as exc:
        raise ProjectFileError("$", str(exc)) from None


def _error_doc(message: str, report: ValidationReport | None = None) -> bytes:
    doc = {"error": message}
    if report is not None:
        doc["validation"] = report.to_dict()
    return (fileio.dumps(doc) + "\n").encode("utf-8")


def _parse_pick(text: str):
    if text in ("default", "min", "max"):
        return text
    if text.startswith("u="):
        try:
            u = json.loads(text[2:])
        except ValueError as exc:
            raise UsageError(f"--pick u=...: invalid JSON ({exc})") from None
        if isinstance(u, (int, float)) and not isinstance(u, bool):
            u = [u]
        if not isinstance(u, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in u
        ):
            raise UsageError("--pick u=...: expected a JSON array of numbers")
        return u
    raise UsageError(f"--pick: expected max, min or u=<json vector>, got {text!r}")


def cmd_solve(args) -> int:
    pick = _parse_pick(args.pick)
    model = _load(args.input)
    try:
        family = solve(model, args.problem)
    except ModelError as exc:
        _write(args.output, _error_doc(str(exc), exc.report))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        if isinstance(pick, str):
            schedule = family.pick(pick)
        else:
            if len(pick) != family.family.dim:
                raise UsageError(
                    f"--pick u=...: expected {family.family.dim} entries, got {len(pick)}"
                )
            schedule = instantiate(family, pick)
    except OutOfBoundsError as exc:
        raise UsageError(str(exc)) from None
    _write(args.output, fileio.emit_report(family, schedule))
    return EXIT_OK


def _applicable(model) -> list[Problem]:
    return [
        p for p in Problem if all(getattr(model, name) is not None for name in REQUIRED_VECTORS[p])
    ]


def cmd_validate(args) -> int:
    model = _load(args.input)
    if args.problem:
        reports = [validate(model, args.problem)]
    else:
        reports = [validate(model, p) for p in _applicable(model)]
        if not reports:
            # no problem has its data; still check the precedence lags
            report = ValidationReport(None)
            t = tr_fn(aggregate_precedence(model))
            report.values["Tr(D)"] = t
            if t > TOL:
                report.errors.append(f"precedence constraints incompatible: Tr(D) = {t:g} > 0")
            report.notes.append("no problem has all of its required vectors")
            reports = [report]
    valid = all(r.ok for r in reports)
    doc = {"valid": valid, "reports": [r.to_dict() for r in reports]}
    _write(args.output, (fileio.dumps(doc) + "\n").encode("utf-8"))
    for r in reports:
        for e in r.errors:
            print(f"error: {e}", file=sys.stderr)
    return EXIT_OK if valid else EXIT_INVALID


def _parse_step(text: str) -> Fraction:
    try:
        step = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--step: not a number: {text!r}") from None
    if step <= 0:
        raise UsageError("--step must be positive")
    return step


def _parse_bounds(text: str, n: int):
    try:
        doc = json.loads(text)
    except ValueError as exc:
        raise UsageError(f"--bounds: invalid JSON ({exc})") from None
    if isinstance(doc, dict):
        lo, hi = doc.get("lower"), doc.get("upper")
    elif isinstance(doc, list) and len(doc) == 2:
        lo, hi = doc
    else:
        raise UsageError('--bounds: expected {"lower": ..., "upper": ...} or [lower, upper]')

    def expand(v, side):
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            return [v] * n
        if isinstance(v, list) and len(v) == n and all(isinstance(t, (int, float)) for t in v):
            return v
        raise UsageError(f"--bounds: {side} must be a number or a list of {n} numbers")

    return expand(lo, "lower"), expand(hi, "upper")


def cmd_oracle_check(args) -> int:
    model = _load(args.input)
    problem = Problem(args.problem)
    try:
        family = solve(model, problem)
    except ModelError as exc:
        _write(args.output, _error_doc(str(exc), exc.report))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        base = default_grid(model, problem)
        lower, upper = base.lower, base.upper
        if args.bounds:
            lower, upper = _parse_bounds(args.bounds, model.n)
        step = _parse_step(args.step) if args.step else base.step
        grid = GridSpec(tuple(lower), tuple(upper), step)
    except (GridTooLargeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    result = brute_force_minimum(model, problem, grid)
    if result.minimum is None:
        diff = None
        agree = False
    else:
        diff = abs(result.minimum - family.objective)
        agree = diff <= TOL
    doc = {
        "problem": problem.value,
        "solver": family.objective,
        "oracle": result.minimum,
        "difference": diff,
        "agree": agree,
        "grid": {
            "lower": list(grid.lower),
            "upper": list(grid.upper),
            "step": str(grid.step),
            "points": result.points,
            "feasible_points": result.feasible_points,
        },
        "witness": None
        if result.witness is None
        else {"start": result.witness.start.tolist(), "finish": result.witness.finish.tolist()},
    }
    _write(args.output, (fileio.dumps(doc) + "\n").encode("utf-8"))
    if not agree:
        print(
            f"disagreement: solver {family.objective!r}, oracle {result.minimum!r}",
            file=sys.stderr,
        )
        return EXIT_INTERNAL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tropsched",
        description="Closed-form max-plus solvers for time-constrained project scheduling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a scheduling problem and print a report")
    p.add_argument("--problem", required=True, choices=PROBLEMS)
    p.add_argument("--input", required=True, help="project JSON file, '-' for stdin")
    p.add_argument("--output", help="report file (default stdout)")
    p.add_argument(
        "--pick",
        default="default",
        help="schedule to report: max, min or u=<json vector> (default: documented policy)",
    )
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", help="check a project against a problem's preconditions")
    p.add_argument("--input", required=True)
    p.add_argument("--problem", choices=PROBLEMS)
    p.add_argument("--output")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("oracle-check", help="compare the solver with exhaustive grid search")
    p.add_argument("--problem", required=True, choices=PROBLEMS)
    p.add_argument("--input", required=True)
    p.add_argument("--step", help="grid step, e.g. 1/2 (default depends on problem)")
    p.add_argument("--bounds", help='grid bounds as JSON, e.g. {"lower": 0, "upper": [8, 8, 8]}')
    p.add_argument("--output")
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ProjectFileError as exc:
        print(f"invalid project file: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (InfeasibleError, EmptyFamilyError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except TropicalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
