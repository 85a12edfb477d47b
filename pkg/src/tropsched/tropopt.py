"""Direct solvers for four tropical optimization problems.

Each solver returns an :class:`OptResult` holding the minimum value and a
:class:`SolutionFamily` ``x = G u`` parameterised by a free vector ``u``:

* :func:`min_span_deviation` -- minimize ``d^- A x + (A x)^- d``
* :func:`min_range_ratio` -- minimize ``q^- B x (A x)^- p``
* :func:`min_rayleigh_constrained` -- minimize ``x^- A x`` s.t. ``B x + g <= x``
* :func:`min_rayleigh_box` -- minimize ``x^- A x`` s.t. ``g <= x <= h``
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .errors import (
    ConsistencyError,
    DomainError,
    EmptyFamilyError,
    InfeasibleError,
    OutOfBoundsError,
    ShapeError,
)
from .matrix import (
    as_matrix,
    as_vector,
    conjugate_transpose,
    identity,
    kleene_star,
    mat_add,
    mat_mul,
    mat_scale,
    require_column_regular,
    require_regular_vector,
    require_row_regular,
    spectral_radius,
    to_scalar,
    tr_fn,
    trace,
)
from .semifield import TOL, ZERO, inverse, power

__all__ = [
    "FamilyKind",
    "SolutionFamily",
    "OptResult",
    "span_deviation_objective",
    "range_ratio_objective",
    "rayleigh_objective",
    "min_span_deviation",
    "min_range_ratio",
    "theta_trace_sum",
    "min_rayleigh_constrained",
    "min_rayleigh_box",
]


class FamilyKind(str, Enum):
    POINT_MAX = "point-max"
    RAY_SCALED = "ray-scaled"
    CONE = "cone"
    BOX = "box"


@dataclass(frozen=True)
class SolutionFamily:
    """The set ``{G u : lower <= u <= upper}`` over regular ``u``.

    ``lower`` and ``upper`` are column vectors with one entry per column of
    ``generator``, or ``None`` when the side is unbounded. A point is encoded
    with ``lower == upper``.
    """

    generator: np.ndarray
    kind: FamilyKind
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        g = as_matrix(self.generator, "generator")
        object.__setattr__(self, "generator", g)
        object.__setattr__(self, "kind", FamilyKind(self.kind))
        for side in ("lower", "upper"):
            v = getattr(self, side)
            if v is None:
                continue
            v = as_vector(v, side)
            if v.shape[0] != g.shape[1]:
                raise ShapeError(
                    f"{side} bound has length {v.shape[0]}, generator has {g.shape[1]} columns"
                )
            require_regular_vector(v, side)
            object.__setattr__(self, side, v)
        if self.lower is not None and self.upper is not None:
            bad = np.flatnonzero(self.lower.ravel() > self.upper.ravel() + TOL)
            if bad.size:
                i = int(bad[0])
                raise EmptyFamilyError(
                    f"empty solution family: lower[{i}] = {self.lower[i, 0]:g} "
                    f"> upper[{i}] = {self.upper[i, 0]:g}"
                )

    @property
    def dim(self) -> int:
        """Length of the free parameter vector ``u``."""
        return self.generator.shape[1]

    def contains(self, u) -> bool:
        u = as_vector(u, "u")
        if u.shape[0] != self.dim or not np.isfinite(u).all():
            return False
        if self.lower is not None and (u < self.lower - TOL).any():
            return False
        if self.upper is not None and (u > self.upper + TOL).any():
            return False
        return True

    def instantiate(self, u) -> np.ndarray:
        """Return ``G u``; raises :class:`OutOfBoundsError` if ``u`` is not admissible."""
        u = as_vector(u, "u")
        if u.shape[0] != self.dim:
            raise ShapeError(f"u has length {u.shape[0]}, expected {self.dim}")
        if not self.contains(u):
            raise OutOfBoundsError(
                f"u = {u.ravel().tolist()} outside family bounds "
                f"[{_fmt(self.lower)}, {_fmt(self.upper)}]"
            )
        return mat_mul(self.generator, u)

    def compose(self, m) -> "SolutionFamily":
        """The image family ``{M G u}`` with the same bounds on ``u``."""
        return SolutionFamily(mat_mul(m, self.generator), self.kind, self.lower, self.upper)


def _fmt(v):
    return "-" if v is None else v.ravel().tolist()


@dataclass(frozen=True)
class OptResult:
    minimum: float
    family: SolutionFamily


def span_deviation_objective(a, d, x) -> float:
    """``d^- A x + (A x)^- d``."""
    ax = mat_mul(a, as_vector(x, "x"))
    d = as_vector(d, "d")
    return max(
        to_scalar(mat_mul(conjugate_transpose(d), ax)),
        to_scalar(mat_mul(conjugate_transpose(ax), d)),
    )


def range_ratio_objective(a, b, p, q, x) -> float:
    """``q^- B x (A x)^- p``."""
    x = as_vector(x, "x")
    left = to_scalar(mat_mul(conjugate_transpose(as_vector(q, "q")), mat_mul(b, x)))
    right = to_scalar(mat_mul(conjugate_transpose(mat_mul(a, x)), as_vector(p, "p")))
    return left + right


def rayleigh_objective(a, x) -> float:
    """``x^- A x``."""
    x = as_vector(x, "x")
    return to_scalar(mat_mul(conjugate_transpose(x), mat_mul(a, x)))


def min_span_deviation(a, d) -> OptResult:
    """Minimize the two-sided deviation ``d^- A x + (A x)^- d``.

    The minimum is ``((A (d^- A)^-)^- d)^(1/2)`` and the maximum minimizer is
    ``Delta (d^- A)^-``, returned as a ``point-max`` family. ``A`` must be
    row-regular and, for the maximum minimizer to be finite, column-regular.
    """
    a = as_matrix(a, "A")
    d = as_vector(d, "d")
    if a.shape[0] != d.shape[0]:
        raise ShapeError(f"A has {a.shape[0]} rows but d has length {d.shape[0]}")
    require_row_regular(a, "A")
    require_column_regular(a, "A")
    require_regular_vector(d, "d")
    r = conjugate_transpose(mat_mul(conjugate_transpose(d), a))
    delta = power(to_scalar(mat_mul(conjugate_transpose(mat_mul(a, r)), d)), Fraction(1, 2))
    x = mat_scale(delta, r)
    family = SolutionFamily(x, FamilyKind.POINT_MAX, lower=[0.0], upper=[0.0])
    return OptResult(delta, family)


def min_range_ratio(a, b, p, q) -> OptResult:
    """Minimize ``q^- B x (A x)^- p``.

    The minimum ``(A (q^- B)^-)^- p`` is attained on the ray ``alpha (q^- B)^-``
    for every finite ``alpha``. The ray is an attaining family, not necessarily
    the full set of minimizers.
    """
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    p = as_vector(p, "p")
    q = as_vector(q, "q")
    if a.shape != b.shape:
        raise ShapeError(f"A has shape {a.shape} but B has shape {b.shape}")
    require_row_regular(a, "A")
    require_column_regular(b, "B")
    if not np.isfinite(p).any():
        raise DomainError("p must be a nonzero vector")
    require_regular_vector(q, "q")
    r = conjugate_transpose(mat_mul(conjugate_transpose(q), b))
    delta = to_scalar(mat_mul(conjugate_transpose(mat_mul(a, r)), p))
    return OptResult(delta, SolutionFamily(r, FamilyKind.RAY_SCALED))


def theta_trace_sum(a, b) -> float:
    """Minimum of ``x^- A x`` under ``B x <= x``.

    Equals the spectral radius of ``A`` combined (tropically) with
    ``tr^(1/k)`` of every product containing ``k`` factors ``A`` and
    ``l`` factors ``B``, ``1 <= k <= n-1``, ``1 <= l <= n-k``. The products are
    accumulated per ``(k, l)`` by ``T_kl = T_(k-1)l A + T_k(l-1) B``, which
    costs O(n^5) scalar operations overall.
    """
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ShapeError(f"need square matrices of equal order, got {a.shape} and {b.shape}")
    n = a.shape[0]
    theta = spectral_radius(a)
    # prev[l] holds T_(k-1),l for l = 0..n-k+1
    prev = [identity(n)]
    for _ in range(1, n):
        prev.append(mat_mul(prev[-1], b))
    for k in range(1, n):
        cur = [mat_mul(prev[0], a)]
        for l in range(1, n - k + 1):
            t = mat_add(mat_mul(prev[l], a), mat_mul(cur[l - 1], b))
            cur.append(t)
            theta = max(theta, power(trace(t), Fraction(1, k)))
        prev = cur
    return theta


def _require_cycle_value(lam: float) -> None:
    if lam == ZERO:
        raise DomainError("spectral radius of A is -inf: objective x^- A x is degenerate")


def min_rayleigh_constrained(a, b, g) -> OptResult:
    """Minimize ``x^- A x`` subject to ``B x + g <= x``.

    All minimizers are ``(theta^-1 A + B)* u`` with ``u >= g`` (a ``cone``
    family). Requires ``lambda(A) > -inf``, ``Tr(B) <= 0`` and regular ``g``.
    """
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    g = as_vector(g, "g")
    if a.shape != b.shape or a.shape[0] != g.shape[0]:
        raise ShapeError(f"incompatible shapes A {a.shape}, B {b.shape}, g {g.shape}")
    _require_cycle_value(spectral_radius(a))
    tb = tr_fn(b)
    if tb > TOL:
        raise InfeasibleError(tb, "B")
    require_regular_vector(g, "g")
    theta = theta_trace_sum(a, b)
    try:
        gen = kleene_star(mat_add(mat_scale(inverse(theta), a), b), "theta^-1 A + B")
    except InfeasibleError as exc:  # pragma: no cover - excluded by the choice of theta
        raise ConsistencyError(f"star of the scaled objective matrix failed: {exc}") from exc
    return OptResult(theta, SolutionFamily(gen, FamilyKind.CONE, lower=g))


def min_rayleigh_box(a, g, h) -> OptResult:
    """Minimize ``x^- A x`` subject to ``g <= x <= h``.

    The minimum is ``lambda(A) + sum_{k=1}^{n-1} (h^- A^k g)^(1/k)`` and all
    minimizers are ``(theta^-1 A)* u`` with ``g <= u <= (h^- (theta^-1 A)*)^-``.
    """
    a = as_matrix(a, "A")
    g = as_vector(g, "g")
    h = as_vector(h, "h")
    n = a.shape[0]
    if a.shape != (n, n) or g.shape[0] != n or h.shape[0] != n:
        raise ShapeError(f"incompatible shapes A {a.shape}, g {g.shape}, h {h.shape}")
    lam = spectral_radius(a)
    _require_cycle_value(lam)
    require_regular_vector(h, "h")
    require_regular_vector(g, "g")
    hc = conjugate_transpose(h)
    gap = to_scalar(mat_mul(hc, g))
    if gap > TOL:
        raise EmptyFamilyError(f"empty box: h^- g = {gap:g} > 0 (g is not below h)")
    theta = lam
    ak = identity(n)
    for k in range(1, n):
        ak = mat_mul(ak, a)
        theta = max(theta, power(to_scalar(mat_mul(mat_mul(hc, ak), g)), Fraction(1, k)))
    gen = kleene_star(mat_scale(inverse(theta), a), "theta^-1 A")
    upper = conjugate_transpose(mat_mul(hc, gen))
    return OptResult(theta, SolutionFamily(gen, FamilyKind.BOX, lower=g, upper=upper))
