"""Scalar arithmetic in the max-plus semifield R_max,+.

Scalars are plain Python floats. ``ZERO`` (-inf) is the additive neutral and
multiplicatively absorbing element, ``ONE`` (0.0) is the multiplicative
identity. ``+inf`` and NaN are not elements of the semifield and are rejected
by :func:`scalar`.

>>> oplus(3, 5), otimes(3, 5), inverse(7.0), power(6, Fraction(1, 2))
(5.0, 8.0, -7.0, 3.0)
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational, Real

from .errors import DomainError

__all__ = [
    "ZERO",
    "ONE",
    "TOL",
    "scalar",
    "is_zero",
    "oplus",
    "otimes",
    "inverse",
    "power",
]

ZERO = -math.inf
ONE = 0.0

# Slack used wherever k-th roots introduce rounding; all other comparisons are exact.
TOL = 1e-9


def scalar(value) -> float:
    """Coerce ``value`` to a semifield element.

    ``None`` maps to ``ZERO``. NaN and ``+inf`` raise :class:`DomainError`.
    """
    if value is None:
        return ZERO
    v = float(value)
    if math.isnan(v):
        raise DomainError("NaN is not an element of R_max,+")
    if v == math.inf:
        raise DomainError("+inf is not an element of R_max,+")
    return v


def is_zero(a: float) -> bool:
    return a == ZERO


def oplus(a, b) -> float:
    """Tropical addition: ``max(a, b)``."""
    return max(scalar(a), scalar(b))


def otimes(a, b) -> float:
    """Tropical multiplication: conventional ``a + b``, with -inf absorbing."""
    return scalar(a) + scalar(b)


def inverse(a) -> float:
    """Multiplicative inverse ``-a``; the zero element has none."""
    v = scalar(a)
    if v == ZERO:
        raise DomainError("zero has no inverse")
    return -v


def power(a, r) -> float:
    """Tropical power ``a^r``, i.e. the conventional product ``a * r``.

    ``r`` may be an int, a :class:`fractions.Fraction` or a float. Rational
    exponents are evaluated as ``a * p / q`` so that ``power(6, Fraction(1, 2))``
    is exactly 3. ``power(ZERO, 0)`` is ``ONE`` and negative powers of ``ZERO``
    raise :class:`DomainError`.
    """
    v = scalar(a)
    if not isinstance(r, Real):
        raise TypeError(f"exponent must be a real number, got {type(r).__name__}")
    if r == 0:
        return ONE
    if v == ZERO:
        if r < 0:
            raise DomainError("negative power of zero is undefined")
        return ZERO
    if isinstance(r, Rational):
        r = Fraction(r)
        return v * r.numerator / r.denominator
    return v * float(r)
