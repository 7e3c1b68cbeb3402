"""Reexpansion around a trial frequency.

Splitting omega**2 = Omega**2 + (omega**2 - Omega**2) and expanding in
ghat = g / Omega**3 at fixed sigma = Omega (Omega**2 - omega**2) / g turns the
weak-coupling coefficients E_j into polynomials in sigma,

    eps_k(sigma) = sum_{j<=k} E_j binom((1-3j)/2, k-j) (-4 sigma)**(k-j),

and the order-N variational energy W_N = Omega * sum_{k<=N} eps_k(sigma) (ghat/4)**k.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
from gmpy2 import mpq

from ._numeric import check_precision, is_rational, rationalize, to_mpf, to_mpq
from .exactseries import WeakSeries, bender_wu


class PrecisionError(ArithmeticError):
    """Two evaluations at different working precisions disagree."""


@lru_cache(maxsize=None)
def half_binomial(j: int, m: int) -> mpq:
    """Generalized binomial ((1 - 3j)/2 choose m)."""
    if m < 0:
        return mpq(0)
    top = mpq(1 - 3 * j, 2)
    out = mpq(1)
    for i in range(m):
        out = out * (top - i) / (i + 1)
    return out


@dataclass(frozen=True)
class SigmaPolynomial:
    """Polynomial in sigma with exact rational coefficients, constant term first."""

    coeffs: tuple

    def __post_init__(self):
        c = list(self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(to_mpq(x) for x in (c or [0])))

    @property
    def degree(self) -> int:
        if len(self.coeffs) == 1 and self.coeffs[0] == 0:
            return -1
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.degree < 0

    def __call__(self, x):
        """Horner evaluation; exact for rational x, otherwise at mpmath precision."""
        if is_rational(x):
            x = to_mpq(x)
            acc = mpq(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        acc = mpmath.mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * x + to_mpf(c)
        return acc

    def derivative(self) -> "SigmaPolynomial":
        if len(self.coeffs) == 1:
            return SigmaPolynomial((0,))
        return SigmaPolynomial(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def scale(self, factor) -> "SigmaPolynomial":
        f = to_mpq(factor)
        return SigmaPolynomial(tuple(f * c for c in self.coeffs))

    def __str__(self):
        return " + ".join(f"({c})*s^{i}" for i, c in enumerate(self.coeffs) if c != 0) or "0"


@dataclass(frozen=True)
class ReexpandedSeries:
    order: int
    polys: tuple
    source: WeakSeries = field(repr=False)


@dataclass(frozen=True)
class CouplingSpec:
    """Coupling g > 0 and frequency omega >= 0, held as exact rationals.

    Decimal strings are read exactly, so CouplingSpec("0.4", 1).g == 2/5.
    """

    g: object
    omega: object = 1

    def __post_init__(self):
        g, omega = to_mpq(self.g), to_mpq(self.omega)
        if g <= 0:
            raise ValueError(f"coupling must be positive, got {g}")
        if omega < 0:
            raise ValueError(f"frequency must be non-negative, got {omega}")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "omega", omega)

    @property
    def gbar(self):
        """g / omega**3, or None in the pure quartic case omega = 0."""
        if self.omega == 0:
            return None
        return self.g / self.omega**3


def epsilon_polys(weak: WeakSeries, N: int) -> ReexpandedSeries:
    if N < 0:
        raise ValueError(f"order must be non-negative, got {N}")
    if weak.max_order < N:
        raise ValueError(f"order {N} needs weak coefficients up to {N}, only {weak.max_order} available")
    polys = []
    for k in range(N + 1):
        coeffs = [mpq(0)] * (k + 1)
        for j in range(k + 1):
            coeffs[k - j] = weak[j] * half_binomial(j, k - j) * mpq(-4) ** (k - j)
        polys.append(SigmaPolynomial(tuple(coeffs)))
    return ReexpandedSeries(N, tuple(polys), weak)


def reexpanded(N: int) -> ReexpandedSeries:
    return epsilon_polys(bender_wu(N), N)


def _exact_w(series: ReexpandedSeries, spec: CouplingSpec, Omega: mpq) -> mpq:
    g, omega = spec.g, spec.omega
    sigma = Omega * (Omega**2 - omega**2) / g
    x = g / Omega**3 / 4
    acc = mpq(0)
    for poly in reversed(series.polys):
        acc = acc * x + poly(sigma)
    return Omega * acc


def w_n_eval(series: ReexpandedSeries, spec: CouplingSpec, Omega, precision: int = 30, working=None):
    """Variational energy W_N(g, Omega) at the series order.

    Omega is rationalized at the working precision (default 40 + 2N digits)
    and everything after that is exact; the result is rounded once.  A second
    pass at +20 digits must agree to the requested precision.
    """
    check_precision(precision)
    if isinstance(Omega, str):
        Omega = to_mpq(Omega)
    if Omega <= 0:
        raise ValueError("trial frequency must be positive")
    if working is None:
        working = max(precision, 40 + 2 * series.order)
    if is_rational(Omega):
        value = _exact_w(series, spec, to_mpq(Omega))
        with mpmath.workdps(precision):
            return to_mpf(value)
    first = _exact_w(series, spec, rationalize(Omega, working))
    second = _exact_w(series, spec, rationalize(Omega, working + 20))
    with mpmath.workdps(precision + 10):
        a, b = to_mpf(first), to_mpf(second)
        if abs(a - b) > mpmath.mpf(10) ** (-precision) * max(1, abs(b)):
            raise PrecisionError(f"W_{series.order}: passes at {working} and {working + 20} digits disagree")
    with mpmath.workdps(precision):
        return to_mpf(second)


def weak_partial_sum(weak: WeakSeries, spec: CouplingSpec, N: int) -> mpq:
    """omega * sum_{k<=N} E_k (gbar/4)**k, exactly."""
    if spec.omega == 0:
        raise ValueError("the weak-coupling series needs omega > 0")
    x = spec.gbar / 4
    acc = mpq(0)
    for k in range(N, -1, -1):
        acc = acc * x + weak[k]
    return spec.omega * acc
