"""Small shared helpers."""

from __future__ import annotations

import math
from fractions import Fraction


def binom(a: int, k: int) -> int:
    """Binomial coefficient binom(a, k) for any integer a and k >= 0."""
    if k < 0:
        return 0
    if a >= 0:
        if k > a:
            return 0
        return math.comb(a, k)
    # binom(a, k) = (-1)^k binom(k - a - 1, k) for a < 0.
    return (-1) ** k * math.comb(k - a - 1, k)


def val_is_zero(x) -> bool:
    """Zero test for any coefficient value (scalar or Fock vector)."""
    z = getattr(x, "is_zero", None)
    if z is not None:
        return z()
    return x == 0


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return x.as_fraction()
