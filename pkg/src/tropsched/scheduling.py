"""Project models and the four time-constrained scheduling solvers.

A project with ``n`` activities is described by lag matrices over R_max,+:

* ``start_finish[i][j]``: minimum lag from the start of ``j`` to the finish of
  ``i``; the diagonal holds minimum durations and must be finite,
* ``start_start[i][j]``: minimum lag from the start of ``j`` to the start of ``i``,
* ``finish_start[i][j]``: minimum lag from the finish of ``j`` to the start of ``i``,

plus optional due dates, deadlines, release times and release deadlines.
Finish times are always ``y = start_finish @ x`` (each activity finishes as
soon as its start-finish lags allow).

Every solver reduces its problem to one of the generic problems in
:mod:`tropsched.tropopt` and returns a :class:`ScheduleFamily`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import ConsistencyError, ModelError, OutOfBoundsError, ShapeError
from .matrix import (
    as_matrix,
    as_vector,
    conjugate_transpose,
    identity,
    kleene_star,
    mat_add,
    mat_mul,
    ones,
    spectral_radius,
    to_scalar,
    tr_fn,
    zeros,
)
from .semifield import TOL, ZERO, inverse
from .tropopt import (
    FamilyKind,
    SolutionFamily,
    min_range_ratio,
    min_rayleigh_box,
    min_rayleigh_constrained,
    min_span_deviation,
)

__all__ = [
    "Problem",
    "ProjectModel",
    "Schedule",
    "ScheduleFamily",
    "ValidationReport",
    "aggregate_precedence",
    "validate",
    "evaluate_objective",
    "solve",
    "solve_due_date_deviation",
    "solve_finish_spread",
    "solve_flow_time",
    "solve_makespan",
    "instantiate",
]


class Problem(str, Enum):
    DUE_DATE_DEVIATION = "due-date"
    FINISH_SPREAD = "finish-spread"
    FLOW_TIME = "flow-time"
    MAKESPAN = "makespan"


# Vectors each problem needs, keyed by ProjectModel attribute.
REQUIRED_VECTORS = {
    Problem.DUE_DATE_DEVIATION: ("due_dates",),
    Problem.FINISH_SPREAD: ("deadlines",),
    Problem.FLOW_TIME: ("release_times",),
    Problem.MAKESPAN: ("release_times", "release_deadlines", "deadlines"),
}

VECTOR_FIELDS = ("due_dates", "deadlines", "release_times", "release_deadlines")


@dataclass(frozen=True)
class ProjectModel:
    start_finish: np.ndarray
    start_start: np.ndarray | None = None
    finish_start: np.ndarray | None = None
    due_dates: np.ndarray | None = None
    deadlines: np.ndarray | None = None
    release_times: np.ndarray | None = None
    release_deadlines: np.ndarray | None = None
    names: Sequence[str] | None = None

    def __post_init__(self):
        a = as_matrix(self.start_finish, "start_finish")
        n = a.shape[0]
        if a.shape != (n, n):
            raise ShapeError(f"start_finish must be square, got shape {a.shape}")
        diag = np.diag(a)
        if not np.isfinite(diag).all():
            i = int(np.flatnonzero(~np.isfinite(diag))[0])
            raise ValueError(f"start_finish[{i}][{i}] (minimum duration) must be finite")
        object.__setattr__(self, "start_finish", a)
        for name in ("start_start", "finish_start"):
            m = getattr(self, name)
            m = zeros(n, n) if m is None else as_matrix(m, name)
            if m.shape != (n, n):
                raise ShapeError(f"{name} must have shape {(n, n)}, got {m.shape}")
            object.__setattr__(self, name, m)
        for name in VECTOR_FIELDS:
            v = getattr(self, name)
            if v is None:
                continue
            v = as_vector(v, name)
            if v.shape[0] != n:
                raise ShapeError(f"{name} must have length {n}, got {v.shape[0]}")
            object.__setattr__(self, name, v)
        if self.names is None:
            object.__setattr__(self, "names", tuple(f"a{i + 1}" for i in range(n)))
        else:
            names = tuple(str(s) for s in self.names)
            if len(names) != n:
                raise ShapeError(f"{len(names)} activity names for {n} activities")
            object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return self.start_finish.shape[0]


@dataclass(frozen=True)
class Schedule:
    """Concrete start and finish times (1-D arrays) with the achieved objective."""

    start: np.ndarray
    finish: np.ndarray
    objective: float | None
    problem: Problem
    parameter: np.ndarray | None = None


@dataclass(frozen=True)
class ScheduleFamily:
    """All reported optimal schedules ``x = family.generator @ u``, ``y = A x``."""

    problem: Problem
    model: ProjectModel
    objective: float
    family: SolutionFamily
    default: Schedule
    diagnostics: tuple[str, ...] = ()

    def pick(self, policy: str = "default") -> Schedule:
        """Instantiate at ``"default"``, ``"min"`` (lower bound) or ``"max"`` (upper bound)."""
        if policy == "default":
            return self.default
        fam = self.family
        if policy not in ("min", "max"):
            raise ValueError(f"unknown pick policy {policy!r}")
        bound = fam.lower if policy == "min" else fam.upper
        if bound is None:
            side = "lower" if policy == "min" else "upper"
            raise OutOfBoundsError(f"{fam.kind.value} family has no {side} bound to pick")
        return instantiate(self, bound)

    def start_bounds(self) -> tuple[np.ndarray | None, np.ndarray | None]:
        """Start times at the lower and upper parameter bounds.

        ``G u`` is monotone in ``u``, so every member's start vector lies
        between the two (a side is ``None`` when unbounded).
        """
        fam = self.family
        lo = None if fam.lower is None else mat_mul(fam.generator, fam.lower).ravel()
        hi = None if fam.upper is None else mat_mul(fam.generator, fam.upper).ravel()
        return lo, hi


@dataclass
class ValidationReport:
    problem: Problem | None
    errors: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    values: dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {
            "problem": None if self.problem is None else self.problem.value,
            "valid": self.ok,
            "errors": list(self.errors),
            "notes": list(self.notes),
            "values": dict(self.values),
        }


def aggregate_precedence(model: ProjectModel) -> np.ndarray:
    """Combine start-start and finish-start lags into one matrix ``B + C A``.

    With ``y = A x`` substituted, both kinds of constraint read ``D x <= x``.
    """
    return mat_add(model.start_start, mat_mul(model.finish_start, model.start_finish))


def _check_vector(model: ProjectModel, name: str, problem: Problem, report: ValidationReport):
    v = getattr(model, name)
    if v is None:
        report.errors.append(f"{name}: required for the {problem.value} problem")
        return
    bad = np.flatnonzero(~np.isfinite(v.ravel()))
    if bad.size:
        report.errors.append(f"{name}: entry {int(bad[0])} is -inf (vector must be regular)")


def validate(model: ProjectModel, problem: Problem | str) -> ValidationReport:
    """List every violated precondition of ``problem``; empty iff solvable."""
    problem = Problem(problem)
    report = ValidationReport(problem)
    a = model.start_finish

    for name in REQUIRED_VECTORS[problem]:
        _check_vector(model, name, problem, report)
    vectors_ok = report.ok
    for name in VECTOR_FIELDS:
        if name not in REQUIRED_VECTORS[problem] and getattr(model, name) is not None:
            report.notes.append(f"{name}: not used by the {problem.value} problem")

    # a finite diagonal already implies these; kept for models built by hand
    lam = spectral_radius(a)
    report.values["spectral_radius"] = lam
    if lam == ZERO:
        report.errors.append("start_finish: spectral radius is -inf")

    if problem is Problem.MAKESPAN:
        if np.isfinite(model.start_start).any() or np.isfinite(model.finish_start).any():
            report.notes.append(
                "start_start/finish_start: not used by the makespan problem"
            )
        if vectors_ok:
            bound = mat_add(
                conjugate_transpose(model.release_deadlines),
                mat_mul(conjugate_transpose(model.deadlines), a),
            )
            gap = to_scalar(mat_mul(bound, model.release_times))
            report.values["box_condition"] = gap
            if gap > TOL:
                report.errors.append(
                    f"release/deadline window empty: (h^- + f^- A) g = {gap:g} > 0"
                )
        return report

    d = aggregate_precedence(model)
    t = tr_fn(d)
    report.values["Tr(D)"] = t
    if t > TOL:
        report.errors.append(
            f"precedence constraints incompatible: Tr(D) = {t:g} > 0 "
            "(positive-weight cycle in start-start/finish-start lags)"
        )
    return report


def _checked(model: ProjectModel, problem: Problem) -> ValidationReport:
    report = validate(model, problem)
    if not report.ok:
        raise ModelError(report)
    return report


def evaluate_objective(problem: Problem, model: ProjectModel, x, y) -> float:
    """Objective of ``problem`` in tropical form for start ``x`` and finish ``y``."""
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    one = ones(model.n)
    if problem is Problem.DUE_DATE_DEVIATION:
        d = model.due_dates
        return max(
            to_scalar(mat_mul(conjugate_transpose(d), y)),
            to_scalar(mat_mul(conjugate_transpose(y), d)),
        )
    if problem is Problem.FINISH_SPREAD:
        return to_scalar(mat_mul(one.T, y)) + to_scalar(mat_mul(conjugate_transpose(y), one))
    if problem is Problem.FLOW_TIME:
        return to_scalar(mat_mul(conjugate_transpose(x), y))
    return to_scalar(mat_mul(one.T, y)) + to_scalar(mat_mul(conjugate_transpose(x), one))


def _constraint_gap(problem: Problem, model: ProjectModel, x, y) -> float:
    """Largest violation among the constraints active for ``problem`` (<= 0 when feasible)."""
    gaps = [0.0]
    if problem is not Problem.MAKESPAN:
        gaps.append(float((mat_mul(aggregate_precedence(model), x) - x).max()))
    if problem in (Problem.FINISH_SPREAD, Problem.MAKESPAN):
        gaps.append(float((y - model.deadlines).max()))
    if problem in (Problem.FLOW_TIME, Problem.MAKESPAN):
        gaps.append(float((model.release_times - x).max()))
    if problem is Problem.MAKESPAN:
        gaps.append(float((x - model.release_deadlines).max()))
    return max(gaps)


def instantiate(family: ScheduleFamily, u) -> Schedule:
    """Build the schedule ``x = G u``, ``y = A x`` and re-check it.

    Raises :class:`OutOfBoundsError` if ``u`` violates the family bounds and
    :class:`ConsistencyError` if the schedule is infeasible or its objective
    differs from the family objective by more than ``TOL``.
    """
    u = as_vector(u, "u")
    model = family.model
    x = family.family.instantiate(u)
    y = mat_mul(model.start_finish, x)
    value = evaluate_objective(family.problem, model, x, y)
    if abs(value - family.objective) > TOL:
        raise ConsistencyError(
            f"objective {value!r} at u = {u.ravel().tolist()} differs from "
            f"reported optimum {family.objective!r}"
        )
    gap = _constraint_gap(family.problem, model, x, y)
    if gap > TOL:
        raise ConsistencyError(f"schedule at u = {u.ravel().tolist()} violates constraints by {gap:g}")
    return Schedule(
        start=_flat(x), finish=_flat(y), objective=value, problem=family.problem, parameter=_flat(u)
    )


def _flat(v: np.ndarray) -> np.ndarray:
    out = np.array(v, dtype=np.float64).ravel()
    out.setflags(write=False)
    return out


def _build(problem, model, objective, family, default_u, report) -> ScheduleFamily:
    draft = ScheduleFamily(problem, model, objective, family, default=None, diagnostics=())
    default = instantiate(draft, default_u)
    return ScheduleFamily(
        problem, model, objective, family, default, diagnostics=tuple(report.notes)
    )


def solve_due_date_deviation(model: ProjectModel) -> ScheduleFamily:
    """Minimize the largest deviation ``|y_i - d_i|`` of finish times from due dates.

    Subject to ``y = A x``, ``B x <= x`` and ``C y <= x``. The reported family
    is the single latest optimal schedule.
    """
    problem = Problem.DUE_DATE_DEVIATION
    report = _checked(model, problem)
    dstar = kleene_star(aggregate_precedence(model), "D")
    res = min_span_deviation(mat_mul(model.start_finish, dstar), model.due_dates)
    family = res.family.compose(dstar)
    return _build(problem, model, res.minimum, family, [0.0], report)


def solve_finish_spread(model: ProjectModel) -> ScheduleFamily:
    """Minimize ``max y - min y`` under precedence lags and deadlines ``y <= f``.

    The family is the ray ``x = alpha * G`` (tropically, ``x_i = alpha + G_i``)
    with ``alpha`` bounded above by the deadlines; the default is the largest
    admissible ``alpha``.
    """
    problem = Problem.FINISH_SPREAD
    report = _checked(model, problem)
    a = model.start_finish
    dstar = kleene_star(aggregate_precedence(model), "D")
    ad = mat_mul(a, dstar)
    one = ones(model.n)
    res = min_range_ratio(ad, ad, one, one)
    ray = res.family.generator
    gen = mat_mul(dstar, ray)
    alpha_max = inverse(
        to_scalar(mat_mul(mat_mul(conjugate_transpose(model.deadlines), ad), ray))
    )
    family = SolutionFamily(gen, FamilyKind.RAY_SCALED, upper=[alpha_max])
    report.values["alpha_max"] = alpha_max
    return _build(problem, model, res.minimum, family, [alpha_max], report)


def solve_flow_time(model: ProjectModel) -> ScheduleFamily:
    """Minimize the largest flow time ``y_i - x_i`` under precedence lags and ``x >= g``.

    Every optimal schedule is ``x = G u`` with ``u >= g``; the default is ``u = g``,
    which gives the earliest optimal schedule.
    """
    problem = Problem.FLOW_TIME
    report = _checked(model, problem)
    res = min_rayleigh_constrained(
        model.start_finish, aggregate_precedence(model), model.release_times
    )
    return _build(problem, model, res.minimum, res.family, model.release_times, report)


def solve_makespan(model: ProjectModel) -> ScheduleFamily:
    """Minimize ``max y - min x`` under ``g <= x <= h`` and ``y <= f``.

    The deadlines are folded into the release deadlines as
    ``x <= (h^- + f^- A)^-``; the result is a box family in ``u`` with the
    default ``u = g``. Start-start and finish-start lags are not part of this
    problem and are ignored.
    """
    problem = Problem.MAKESPAN
    report = _checked(model, problem)
    a = model.start_finish
    n = model.n
    g = model.release_times
    upper_c = mat_add(
        conjugate_transpose(model.release_deadlines),
        mat_mul(conjugate_transpose(model.deadlines), a),
    )
    upper = conjugate_transpose(upper_c)
    one = ones(n)
    row = mat_mul(one.T, a)
    res = min_rayleigh_box(mat_mul(one, row), g, upper)

    # closed form of the same minimum: 1^T A (I + g (h^- + f^- A)) 1
    closed = to_scalar(mat_mul(mat_mul(row, mat_add(identity(n), mat_mul(g, upper_c))), one))
    if abs(closed - res.minimum) > TOL:
        raise ConsistencyError(
            f"makespan closed form {closed!r} disagrees with box solver {res.minimum!r}"
        )
    return _build(problem, model, res.minimum, res.family, g, report)


_SOLVERS = {
    Problem.DUE_DATE_DEVIATION: solve_due_date_deviation,
    Problem.FINISH_SPREAD: solve_finish_spread,
    Problem.FLOW_TIME: solve_flow_time,
    Problem.MAKESPAN: solve_makespan,
}


def solve(model: ProjectModel, problem: Problem | str) -> ScheduleFamily:
    return _SOLVERS[Problem(problem)](model)
