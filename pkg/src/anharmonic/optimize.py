"""Order-dependent optimization of the trial frequency.

dW_N/dOmega = (ghat/4)**N * P_N(sigma) with P_N = -2 d eps_{N+1}/d sigma, so the
stationary points are roots of a degree-N polynomial in sigma alone, and the
coupling only enters when sigma is turned back into Omega.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache

import mpmath
from gmpy2 import mpq

from ._numeric import check_precision, decimal_string, to_mpf, to_mpq
from .reexpand import CouplingSpec, ReexpandedSeries, SigmaPolynomial, reexpanded
from .roots import RealRoot, refine_root
from .roots import real_roots as _real_roots

# slope and subleading constant of sigma_N ~ c N (1 + b / N**(2/3))
SIGMA_SLOPE = 0.186047272
SIGMA_SUBLEADING = 6.85

EXTREMUM = "extremum"
TURNING_POINT = "turning-point"


class DegenerateOrder(ArithmeticError):
    """Neither P_N nor P_N' has a positive real root."""


@dataclass(frozen=True)
class CriticalPolynomial:
    order: int
    poly: SigmaPolynomial

    def __call__(self, sigma):
        return self.poly(sigma)


@dataclass(frozen=True)
class SigmaOptimum:
    order: int
    sigma: mpmath.mpf
    kind: str
    fit_reference: float
    bracket: tuple = ()

    @property
    def exact(self):
        lo, hi = self.bracket or (None, None)
        return lo if lo is not None and lo == hi else None

    def as_rational(self, digits: int) -> mpq:
        """sigma as a rational: exact when known, else the bracket midpoint rounded to digits."""
        if self.exact is not None:
            return self.exact
        lo, hi = self.bracket
        mid = (lo + hi) / 2
        scale = 10**digits
        return mpq(round(mid * scale), scale)


@dataclass(frozen=True)
class FrequencySolution:
    Omega: mpmath.mpf
    residual: mpmath.mpf


def sigma_fit(N: int, c: float = SIGMA_SLOPE, b: float = SIGMA_SUBLEADING) -> float:
    return c * N * (1 + b / N ** (2 / 3))


def critical_polynomial(series: ReexpandedSeries, N: int) -> CriticalPolynomial:
    if N < 0:
        raise ValueError(f"order must be non-negative, got {N}")
    if series.order < N + 1:
        raise ValueError(f"P_{N} needs eps_{N + 1}; series stops at order {series.order}")
    return CriticalPolynomial(N, series.polys[N + 1].derivative().scale(-2))


def real_roots(p, precision: int = 30, positive_only: bool = False) -> list[RealRoot]:
    """Sorted real roots of a critical (or any sigma) polynomial."""
    poly = p.poly if isinstance(p, CriticalPolynomial) else p
    if isinstance(poly, SigmaPolynomial):
        coeffs = poly.coeffs
    else:
        coeffs = [to_mpq(x) for x in poly]
    if not any(coeffs):
        raise ValueError("the zero polynomial has no isolated roots")
    return _real_roots(coeffs, precision, positive_only=positive_only)


@lru_cache(maxsize=None)
def _critical(N: int) -> CriticalPolynomial:
    return critical_polynomial(reexpanded(N + 1), N)


@lru_cache(maxsize=None)
def _candidates(N: int):
    # coarse brackets only; the winner is refined afterwards
    P = _critical(N).poly
    ext = [(EXTREMUM, r, P) for r in real_roots(P, 16, positive_only=True) if r.hi > 0]
    turn = []
    if P.degree >= 2:
        dP = P.derivative()
        turn = [(TURNING_POINT, r, dP) for r in real_roots(dP, 16, positive_only=True) if r.hi > 0]
    return ext, turn


@lru_cache(maxsize=None)
def _refined(N: int, kind: str, lo, hi, digits: int):
    ext, turn = _candidates(N)
    for k, r, poly in ext + turn:
        if k == kind and r.lo == lo and r.hi == hi:
            return refine_root(poly.coeffs, r, digits)
    raise KeyError((N, kind))


def select_sigma(N: int, precision: int = 30, rule: str = "nearest") -> SigmaOptimum:
    """Optimal sigma_N, the stationary point closest to the empirical sigma law.

    rule="nearest" ranks positive roots of P_N (extrema) and of P_N'
    (turning points) together by distance to sigma_fit, ties going to the
    extremum and then to the smaller sigma.  rule="extremum-first" only looks
    at turning points when P_N has no positive root at all.
    """
    if N < 1:
        raise ValueError(f"select_sigma needs N >= 1, got {N}")
    if rule not in ("nearest", "extremum-first"):
        raise ValueError(f"unknown selection rule {rule!r}")
    check_precision(precision)
    digits = precision + 10
    ext, turn = _candidates(N)
    fit = sigma_fit(N)
    pool = ext + turn if rule == "nearest" else (ext or turn)
    if not pool:
        raise DegenerateOrder(f"order {N}: no positive real root of P_N or P_N'")
    kind, coarse, _ = min(pool, key=lambda c: (abs(c[1].value - fit), c[0] != EXTREMUM, c[1].value))
    best = _refined(N, kind, coarse.lo, coarse.hi, digits)
    return SigmaOptimum(N, best.value, kind, fit, (best.lo, best.hi))


def sigma_table(n_min: int, n_max: int, precision: int = 30, rule: str = "nearest") -> list[SigmaOptimum]:
    return [select_sigma(N, precision, rule) for N in range(n_min, n_max + 1)]


def sigma_table_csv(optima, digits: int = 30) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "sigma", "kind", "fit_reference"])
    for o in optima:
        w.writerow([o.order, decimal_string(o.sigma, digits), o.kind, repr(round(o.fit_reference, 12))])
    return buf.getvalue()


def omega_from_sigma(sigma, spec: CouplingSpec, precision: int = 30) -> FrequencySolution:
    """Root Omega > omega of Omega**3 - omega**2 Omega - g sigma = 0."""
    check_precision(precision)
    with mpmath.workdps(precision + 15):
        s = mpmath.mpf(sigma) if not isinstance(sigma, mpq) else to_mpf(sigma)
        g, w = to_mpf(spec.g), to_mpf(spec.omega)
        if s < 0:
            raise ValueError("sigma must be non-negative")
        if s == 0:
            return FrequencySolution(+w, mpmath.mpf(0))
        gs = g * s
        if w == 0:
            Om = mpmath.cbrt(gs)
        else:
            def f(x):
                return x**3 - w**2 * x - gs

            lo = max(w, mpmath.cbrt(gs) / 2)
            hi = w + mpmath.cbrt(gs) + 1
            Om = mpmath.findroot(f, (lo, hi), solver="illinois")
            # polish with Newton inside the certified bracket
            for _ in range(8):
                Om = Om - f(Om) / (3 * Om**2 - w**2)
        residual = abs(Om**3 - w**2 * Om - gs)
    with mpmath.workdps(precision):
        return FrequencySolution(+Om, +residual)
