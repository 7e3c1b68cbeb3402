"""Conversions between exact rationals (gmpy2.mpq) and mpmath reals."""

from __future__ import annotations

from fractions import Fraction

import mpmath
from gmpy2 import mpq, mpz

MIN_PRECISION = 16


def to_mpq(x) -> mpq:
    """Exact rational from int, Fraction, mpq, decimal string or float.

    Floats convert to their exact binary value; strings are read as exact
    decimals ("0.4" -> 2/5).
    """
    if isinstance(x, type(mpq())):
        return x
    if isinstance(x, (int, type(mpz()))):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return mpq(Fraction(x.strip()))
    if isinstance(x, float):
        return mpq(x)
    if isinstance(x, mpmath.mpf):
        man, exp = x.man_exp
        return mpq(man) * mpq(2) ** exp if exp >= 0 else mpq(man, mpz(2) ** (-exp))
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def to_mpf(q) -> mpmath.mpf:
    """Round an exact rational once, at the current mpmath precision."""
    q = to_mpq(q)
    return mpmath.mpf(int(q.numerator)) / int(q.denominator)


def rationalize(x, digits: int) -> mpq:
    """Nearest rational with denominator 10**digits (exact inputs pass through)."""
    if isinstance(x, (int, Fraction, type(mpq()), type(mpz()))):
        return to_mpq(x)
    scale = mpz(10) ** digits
    with mpmath.workdps(digits + 20):
        n = mpmath.nint(mpmath.mpf(x) * int(scale))
    return mpq(int(n), scale)


def check_precision(precision: int) -> None:
    if precision < MIN_PRECISION:
        raise ValueError(f"precision must be at least {MIN_PRECISION} digits, got {precision}")


def decimal_string(x, digits: int) -> str:
    """Fixed-width scientific/decimal string, locale independent."""
    with mpmath.workdps(digits + 5):
        return mpmath.nstr(mpmath.mpf(x), digits, strip_zeros=False, min_fixed=-6, max_fixed=8)


def is_rational(x) -> bool:
    return isinstance(x, (int, Fraction, type(mpq()), type(mpz())))


__all__ = [
    "MIN_PRECISION",
    "check_precision",
    "decimal_string",
    "is_rational",
    "rationalize",
    "to_mpf",
    "to_mpq",
]
