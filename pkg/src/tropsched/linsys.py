"""Closed-form solutions of the tropical inequalities ``Ax <= d`` and ``Ax <= x``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix import (
    as_matrix,
    as_vector,
    conjugate_transpose,
    kleene_star,
    mat_mul,
    require_column_regular,
    require_regular_vector,
)

__all__ = ["ConeSolution", "max_solution_upper", "solve_closed_inequality"]


@dataclass(frozen=True)
class ConeSolution:
    """All regular solutions of ``Ax <= x``, namely ``x = generator @ u`` for regular ``u``."""

    generator: np.ndarray

    def instantiate(self, u) -> np.ndarray:
        u = as_vector(u, "u")
        require_regular_vector(u, "u")
        return mat_mul(self.generator, u)


def max_solution_upper(a, d) -> np.ndarray:
    """Greatest solution ``(d^- A)^-`` of ``Ax <= d``.

    Every ``x`` bounded above by the returned column vector solves the
    inequality, and no other ``x`` does. ``A`` must be column-regular and
    ``d`` regular.
    """
    a = as_matrix(a, "A")
    d = as_vector(d, "d")
    require_column_regular(a, "A")
    require_regular_vector(d, "d")
    return conjugate_transpose(mat_mul(conjugate_transpose(d), a))


def solve_closed_inequality(a) -> ConeSolution:
    """Solve ``Ax <= x``; raises :class:`~tropsched.errors.InfeasibleError` if ``Tr(A) > 0``."""
    return ConeSolution(kleene_star(a))
