"""Dense max-plus matrix algebra on numpy arrays.

Matrices are 2-D ``float64`` arrays with ``-inf`` as the tropical zero.
Vectors are column matrices of shape ``(n, 1)``; row vectors have shape
``(1, n)``. Every function accepts nested lists (``None`` meaning ``-inf``)
and returns a fresh read-only array.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import DomainError, InfeasibleError, RegularityError, ShapeError
from .semifield import TOL, ZERO, power, scalar

__all__ = [
    "as_matrix",
    "as_vector",
    "as_row",
    "to_scalar",
    "identity",
    "zeros",
    "ones",
    "mat_add",
    "mat_mul",
    "mat_scale",
    "conjugate_transpose",
    "trace",
    "mat_power",
    "tr_fn",
    "kleene_star",
    "spectral_radius",
    "is_row_regular",
    "is_column_regular",
    "is_regular",
    "is_regular_vector",
    "require_row_regular",
    "require_column_regular",
    "require_regular_vector",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def as_matrix(data, name: str = "matrix") -> np.ndarray:
    """Validate ``data`` as a 2-D tropical matrix."""
    if isinstance(data, np.ndarray):
        arr = np.array(data, dtype=np.float64)
    else:
        arr = np.array(
            [[ZERO if v is None else v for v in row] for row in data], dtype=np.float64
        )
    if arr.ndim != 2:
        raise ShapeError(f"{name}: expected a 2-D matrix, got shape {arr.shape}")
    if np.isnan(arr).any():
        raise DomainError(f"{name}: NaN is not a valid entry")
    if np.isposinf(arr).any():
        raise DomainError(f"{name}: +inf is not a valid entry")
    return _frozen(arr)


def as_vector(data, name: str = "vector") -> np.ndarray:
    """Validate ``data`` as a column vector of shape ``(n, 1)``.

    Accepts flat sequences as well as column matrices.
    """
    arr = np.asarray(data, dtype=object) if not isinstance(data, np.ndarray) else data
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ShapeError(f"{name}: expected a column vector, got shape {arr.shape}")
        flat = arr[:, 0]
    elif arr.ndim == 1:
        flat = arr
    else:
        raise ShapeError(f"{name}: expected a vector, got shape {arr.shape}")
    return as_matrix([[scalar(v)] for v in flat], name)


def as_row(data, name: str = "row") -> np.ndarray:
    """Validate ``data`` as a row vector of shape ``(1, n)``."""
    return as_matrix(as_vector(data, name).T, name)


def to_scalar(m: np.ndarray) -> float:
    """Extract the single entry of a 1x1 matrix."""
    if m.shape != (1, 1):
        raise ShapeError(f"expected a 1x1 matrix, got shape {m.shape}")
    return float(m[0, 0])


def identity(n: int) -> np.ndarray:
    out = np.full((n, n), ZERO)
    np.fill_diagonal(out, 0.0)
    return _frozen(out)


def zeros(rows: int, cols: int) -> np.ndarray:
    """The all ``-inf`` matrix."""
    return _frozen(np.full((rows, cols), ZERO))


def ones(n: int) -> np.ndarray:
    """The column vector of tropical ones (all entries 0)."""
    return _frozen(np.zeros((n, 1)))


def mat_add(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ShapeError(f"cannot add shapes {a.shape} and {b.shape}")
    return _frozen(np.maximum(a, b))


def mat_mul(a, b) -> np.ndarray:
    """Max-plus product: ``(AB)_ij = max_k (a_ik + b_kj)``."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply shapes {a.shape} and {b.shape}")
    if a.shape[1] == 0:
        return zeros(a.shape[0], b.shape[1])
    # -inf + -inf stays -inf; +inf is excluded by as_matrix so no NaN can arise
    return _frozen((a[:, :, None] + b[None, :, :]).max(axis=1))


def mat_scale(c, a) -> np.ndarray:
    """Scalar multiple ``c A`` (entrywise conventional addition of ``c``)."""
    return _frozen(as_matrix(a) + scalar(c))


def conjugate_transpose(a) -> np.ndarray:
    """Multiplicative conjugate transpose: ``-a_ji`` for finite entries, ``-inf`` otherwise."""
    a = as_matrix(a)
    t = a.T.copy()
    finite = np.isfinite(t)
    t[finite] = -t[finite]
    return _frozen(t)


def _require_square(a: np.ndarray, what: str) -> None:
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"{what} requires a square matrix, got shape {a.shape}")


def trace(a) -> float:
    a = as_matrix(a)
    _require_square(a, "trace")
    if a.shape[0] == 0:
        return ZERO
    return float(np.diag(a).max())


def mat_power(a, k: int) -> np.ndarray:
    """Iterated product ``A^k`` with ``A^0 = I``."""
    a = as_matrix(a)
    _require_square(a, "mat_power")
    if k < 0:
        raise ValueError("negative matrix powers are not defined")
    out = identity(a.shape[0])
    for _ in range(k):
        out = mat_mul(out, a)
    return out


def _powers(a: np.ndarray, count: int) -> list[np.ndarray]:
    """``[A, A^2, ..., A^count]``."""
    out = []
    p = a
    for _ in range(count):
        out.append(p)
        p = mat_mul(p, a)
    return out


def tr_fn(a) -> float:
    """``Tr(A) = tr A + tr A^2 + ... + tr A^n`` (tropical sum)."""
    a = as_matrix(a)
    _require_square(a, "tr_fn")
    n = a.shape[0]
    return max((trace(p) for p in _powers(a, n)), default=ZERO)


def spectral_radius(a) -> float:
    """Maximum cycle mean, ``max_k tr(A^k) / k`` over ``k = 1..n``."""
    a = as_matrix(a)
    _require_square(a, "spectral_radius")
    powers = _powers(a, a.shape[0])
    return max(
        (power(trace(p), Fraction(1, k)) for k, p in enumerate(powers, start=1)),
        default=ZERO,
    )


def kleene_star(a, name: str = "A") -> np.ndarray:
    """Kleene star ``A* = I + A + ... + A^(n-1)``.

    Computed by repeated squaring of ``I + A``. Raises :class:`InfeasibleError`
    when ``Tr(A) > 0`` (up to ``TOL``), since the series then has no closure.
    """
    a = as_matrix(a, name)
    _require_square(a, "kleene_star")
    n = a.shape[0]
    t = tr_fn(a)
    if t > TOL:
        raise InfeasibleError(t, name)
    s = mat_add(identity(n), a)
    reach = 1
    while reach < n - 1:
        s = mat_mul(s, s)
        reach *= 2
    return s


def is_row_regular(a) -> bool:
    a = as_matrix(a)
    return bool(np.isfinite(a).any(axis=1).all())


def is_column_regular(a) -> bool:
    a = as_matrix(a)
    return bool(np.isfinite(a).any(axis=0).all())


def is_regular(a) -> bool:
    return is_row_regular(a) and is_column_regular(a)


def is_regular_vector(v) -> bool:
    return bool(np.isfinite(as_matrix(v)).all())


def require_row_regular(a, name: str = "A") -> None:
    a = as_matrix(a, name)
    bad = np.flatnonzero(~np.isfinite(a).any(axis=1))
    if bad.size:
        raise RegularityError(name, "row", int(bad[0]))


def require_column_regular(a, name: str = "A") -> None:
    a = as_matrix(a, name)
    bad = np.flatnonzero(~np.isfinite(a).any(axis=0))
    if bad.size:
        raise RegularityError(name, "column", int(bad[0]))


def require_regular_vector(v, name: str = "v") -> None:
    v = as_matrix(v, name)
    bad = np.flatnonzero(~np.isfinite(v.ravel()))
    if bad.size:
        raise RegularityError(name, "entry", int(bad[0]))
