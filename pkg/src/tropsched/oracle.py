"""Brute-force verification of the closed-form solvers.

Everything here uses conventional arithmetic on plain numpy arrays and
never calls the tropical matrix routines or the solvers, so it can serve
as an independent check on them.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple

import numpy as np

from .errors import GridTooLargeError, ShapeError
from .scheduling import Problem, ProjectModel, Schedule

__all__ = [
    "MAX_GRID_POINTS",
    "GridSpec",
    "Violation",
    "FeasibilityReport",
    "OracleResult",
    "objective_value",
    "check_feasibility",
    "default_grid",
    "grid_chunks",
    "brute_force_minimum",
    "enumerate_theta",
]

MAX_GRID_POINTS = 10**7
TOL = 1e-9
_CHUNK = 1 << 18


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned grid ``lower_i + k * step <= upper_i`` in each coordinate."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    step: Fraction = Fraction(1)

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        step = Fraction(self.step).limit_denominator(10**6)
        if len(lower) != len(upper):
            raise ShapeError("grid bounds have different lengths")
        if step <= 0:
            raise ValueError("grid step must be positive")
        bad = [i for i, (lo, hi) in enumerate(zip(lower, upper)) if lo > hi]
        if bad:
            raise ValueError(f"grid lower bound exceeds upper bound in coordinate {bad[0]}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "step", step)
        if self.size > MAX_GRID_POINTS:
            raise GridTooLargeError(
                f"grid has {self.size} points, more than the limit {MAX_GRID_POINTS}"
            )

    @property
    def counts(self) -> tuple[int, ...]:
        s = float(self.step)
        return tuple(int(math.floor((hi - lo) / s + 1e-9)) + 1 for lo, hi in zip(self.lower, self.upper))

    @property
    def size(self) -> int:
        return math.prod(self.counts)

    def axes(self) -> list[np.ndarray]:
        return [
            lo + np.arange(k) * self.step.numerator / self.step.denominator
            for lo, k in zip(self.lower, self.counts)
        ]


def grid_chunks(grid: GridSpec) -> Iterator[np.ndarray]:
    """Yield the grid points as ``(m, n)`` arrays in lexicographic order."""
    axes = grid.axes()
    n = len(axes)
    split = n
    inner = 1
    while split > 0 and inner * len(axes[split - 1]) <= _CHUNK:
        split -= 1
        inner *= len(axes[split])
    if split == n:
        split -= 1
    inner_axes = axes[split:]
    mesh = np.meshgrid(*inner_axes, indexing="ij")
    inner_pts = np.stack([m.ravel() for m in mesh], axis=1)
    for head in itertools.product(*axes[:split]):
        block = np.empty((inner_pts.shape[0], n))
        block[:, :split] = head
        block[:, split:] = inner_pts
        yield block


class Violation(NamedTuple):
    constraint: str
    index: int
    slack: float


@dataclass
class FeasibilityReport:
    violations: list[Violation]

    @property
    def feasible(self) -> bool:
        return not self.violations


class OracleResult(NamedTuple):
    minimum: float | None
    witness: Schedule | None
    points: int
    feasible_points: int


def _np(v) -> np.ndarray | None:
    return None if v is None else np.asarray(v, dtype=float).ravel()


def _lagged(m: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``out[..., i] = max_j (m[i, j] + x[..., j])`` by explicit loops over ``i, j``."""
    n = m.shape[0]
    out = np.full(x.shape[:-1] + (n,), -np.inf)
    for i in range(n):
        for j in range(m.shape[1]):
            if m[i, j] != -np.inf:
                np.maximum(out[..., i], m[i, j] + x[..., j], out=out[..., i])
    return out


def _objective(problem: Problem, x: np.ndarray, y: np.ndarray, d) -> np.ndarray:
    if problem is Problem.DUE_DATE_DEVIATION:
        return np.abs(y - d).max(axis=-1)
    if problem is Problem.FINISH_SPREAD:
        return y.max(axis=-1) - y.min(axis=-1)
    if problem is Problem.FLOW_TIME:
        return (y - x).max(axis=-1)
    return y.max(axis=-1) - x.min(axis=-1)


def _required(model: ProjectModel, problem: Problem, name: str) -> np.ndarray:
    v = getattr(model, name)
    if v is None:
        raise ValueError(f"{name}: required for the {problem.value} problem")
    return _np(v)


def objective_value(model: ProjectModel, problem: Problem | str, schedule) -> float:
    """Evaluate the scheduling objective of ``problem`` at ``schedule`` (start/finish)."""
    problem = Problem(problem)
    x, y = _np(schedule.start), _np(schedule.finish)
    if x.shape != (model.n,) or y.shape != (model.n,):
        raise ShapeError("schedule length does not match the model")
    d = _required(model, problem, "due_dates") if problem is Problem.DUE_DATE_DEVIATION else None
    return float(_objective(problem, x, y, d))


def _checks(model: ProjectModel, problem: Problem):
    """Active constraints of ``problem`` as ``(name, slack_fn)``; slack <= 0 is satisfied."""
    a = np.asarray(model.start_finish)
    out = []
    if problem is not Problem.MAKESPAN:
        b = np.asarray(model.start_start)
        c = np.asarray(model.finish_start)
        out.append(("start_start", lambda x, y: _lagged(b, x) - x))
        out.append(("finish_start", lambda x, y: _lagged(c, y) - x))
    if problem in (Problem.FINISH_SPREAD, Problem.MAKESPAN):
        f = _required(model, problem, "deadlines")
        out.append(("deadline", lambda x, y: y - f))
    if problem in (Problem.FLOW_TIME, Problem.MAKESPAN):
        g = _required(model, problem, "release_times")
        out.append(("release_time", lambda x, y: g - x))
    if problem is Problem.MAKESPAN:
        h = _required(model, problem, "release_deadlines")
        out.append(("release_deadline", lambda x, y: x - h))
    return a, out


def check_feasibility(model: ProjectModel, problem: Problem | str, schedule) -> FeasibilityReport:
    """List every violated constraint of ``problem`` with its index and slack."""
    problem = Problem(problem)
    a, checks = _checks(model, problem)
    x, y = _np(schedule.start), _np(schedule.finish)
    violations = []
    ax = _lagged(a, x)
    for i in np.flatnonzero(np.abs(ax - y) > TOL):
        violations.append(Violation("start_finish_equality", int(i), float(abs(ax[i] - y[i]))))
    for name, slack in checks:
        s = slack(x, y)
        for i in np.flatnonzero(s > TOL):
            violations.append(Violation(name, int(i), float(s[i])))
    return FeasibilityReport(violations)


def _max_abs_entry(model: ProjectModel) -> float:
    vals = np.concatenate(
        [np.asarray(m).ravel() for m in (model.start_finish, model.start_start, model.finish_start)]
    )
    vals = vals[np.isfinite(vals)]
    return max(1.0, float(np.abs(vals).max()) if vals.size else 1.0)


def default_grid(model: ProjectModel, problem: Problem | str) -> GridSpec:
    """A grid bounded from the model data that contains an optimal schedule.

    The bounds use ``M``, the largest finite ``|lag|``, and the fact that an
    aggregated precedence lag never exceeds ``2M``:

    * due-date: ``[min d - (2n-1)M, max d + M + (spread(d) + 2nM)/2]``, step 1/2
    * finish-spread: ``[min f - (2n-1)M, max f + M]``, step 1
    * flow-time: ``[min g, max g + 2(n-1)M]``, step ``1/lcm(1..n)``
    * makespan: the box ``[g, h]``, step 1

    These contain an optimum for integer data; for other data they are a
    heuristic and may be overridden.
    """
    problem = Problem(problem)
    n = model.n
    big = _max_abs_entry(model)
    if problem is Problem.DUE_DATE_DEVIATION:
        d = _required(model, problem, "due_dates")
        lo = d.min() - (2 * n - 1) * big
        hi = d.max() + big + math.ceil((d.max() - d.min() + 2 * n * big) / 2)
        return GridSpec((lo,) * n, (hi,) * n, Fraction(1, 2))
    if problem is Problem.FINISH_SPREAD:
        f = _required(model, problem, "deadlines")
        return GridSpec((f.min() - (2 * n - 1) * big,) * n, (f.max() + big,) * n)
    if problem is Problem.FLOW_TIME:
        g = _required(model, problem, "release_times")
        step = Fraction(1, math.lcm(*range(1, n + 1)))
        return GridSpec((g.min(),) * n, (g.max() + 2 * (n - 1) * big,) * n, step)
    g = _required(model, problem, "release_times")
    h = _required(model, problem, "release_deadlines")
    return GridSpec(tuple(g), tuple(np.maximum(g, h)))


def brute_force_minimum(
    model: ProjectModel, problem: Problem | str, grid: GridSpec | None = None
) -> OracleResult:
    """Exhaustively minimize the objective of ``problem`` over ``grid``.

    ``y`` is set to ``A x`` for each grid point ``x``. Among points within
    ``TOL`` of the minimum the lexicographically smallest is the witness.
    ``minimum`` and ``witness`` are ``None`` when no grid point is feasible.
    """
    problem = Problem(problem)
    grid = default_grid(model, problem) if grid is None else grid
    if len(grid.lower) != model.n:
        raise ShapeError(f"grid has dimension {len(grid.lower)}, model has {model.n} activities")
    a, checks = _checks(model, problem)
    d = _required(model, problem, "due_dates") if problem is Problem.DUE_DATE_DEVIATION else None

    best_val = math.inf
    best_pt = None
    feasible = 0
    for pts in grid_chunks(grid):
        y = _lagged(a, pts)
        ok = np.ones(pts.shape[0], dtype=bool)
        for _, slack in checks:
            ok &= (slack(pts, y) <= TOL).all(axis=1)
        if not ok.any():
            continue
        feasible += int(ok.sum())
        obj = np.where(ok, _objective(problem, pts, y, d), math.inf)
        m = float(obj.min())
        if m < best_val - TOL:
            best_val = m
            best_pt = pts[int(np.flatnonzero(obj <= m + TOL)[0])].copy()
        elif m < best_val:
            best_val = m

    if best_pt is None:
        return OracleResult(None, None, grid.size, 0)
    witness = Schedule(
        start=best_pt, finish=_lagged(a, best_pt), objective=best_val, problem=problem
    )
    return OracleResult(best_val, witness, grid.size, feasible)


def _product(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    n, m = p.shape[0], q.shape[1]
    out = np.full((n, m), -np.inf)
    for i in range(n):
        for j in range(m):
            out[i, j] = max(p[i, k] + q[k, j] for k in range(p.shape[1]))
    return out


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of ``parts`` nonnegative integers summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_theta(a, b) -> float:
    """Reference value of the mixed trace sum by literal word enumeration.

    The spectral radius is taken as the best mean weight over every closed
    walk of length ``1..n``; the mixed part enumerates every word
    ``A B^i1 ... A B^ik`` with ``1 <= i1 + ... + ik <= n - k``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = a.shape[0]
    best = -math.inf
    for k in range(1, n + 1):
        for walk in itertools.product(range(n), repeat=k):
            w = sum(a[walk[t], walk[(t + 1) % k]] for t in range(k))
            best = max(best, w / k)
    ident = np.full((n, n), -np.inf)
    np.fill_diagonal(ident, 0.0)
    bpow = [ident]
    for _ in range(n):
        bpow.append(_product(bpow[-1], b))
    for k in range(1, n):
        for total in range(1, n - k + 1):
            for exps in _compositions(total, k):
                word = ident
                for e in exps:
                    word = _product(_product(word, a), bpow[e])
                tr = float(np.diag(word).max())
                best = max(best, tr / k)
    return best
