"""Strong-coupling coefficients from the variational approximants.

Taking W_N to large g at fixed sigma_N gives

    E(g) = (g/4)**(1/3) * [alpha_0 + alpha_1 (4 omega**3/g)**(2/3) + alpha_2 (4 omega**3/g)**(4/3) + ...]

with, at ghat = 1/sigma_N,

    alpha_n = (ghat/4)**((2n-1)/3) * sum_{k<=N} (-1)**(k+n) sum_{j<=k-n}
              E_j binom((1-3j)/2, k-j) binom(k-j, n) (-ghat/4)**j.

The double sum is collected into a polynomial in -ghat/4 with exact rational
coefficients; only the fractional power is taken in floating point.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import mpmath
from gmpy2 import mpq

from ._numeric import check_precision, decimal_string, to_mpf, to_mpq
from .exactseries import WeakSeries, bender_wu
from .optimize import SigmaOptimum, select_sigma
from .reexpand import CouplingSpec, PrecisionError, half_binomial


@dataclass(frozen=True)
class ReferenceConstants:
    """Published constants; each field notes where the value comes from."""

    alpha0_ref: str = "0.66798625915577710827096"  # strong-coupling ground-state coefficient, 23 digits
    c: float = 0.186047272  # slope of sigma_N, fixed analytically by the C_1 saddle point
    b: float = 6.85  # subleading constant of the fitted sigma_N law
    gamma: float = -0.242964029  # saddle-point constant of the C_1 cut
    gbar_s_abs: float = 0.160  # modulus of the strong-coupling convergence radius
    theta: float = -0.467  # phase of the complex singularity pair
    envelope: float = 9.23  # asymptotic falloff rate of Delta_N in N**(1/3)

    @property
    def alpha0(self) -> mpmath.mpf:
        return mpmath.mpf(self.alpha0_ref)


REFERENCE = ReferenceConstants()


@dataclass(frozen=True)
class StrongCouplingSeries:
    order: int
    sigma: mpmath.mpf
    alphas: tuple
    precision: int
    kind: str = ""
    ghat: mpmath.mpf = field(default=None, repr=False)

    def __len__(self):
        return len(self.alphas)


@dataclass(frozen=True)
class DeltaEntry:
    N: int
    delta: mpmath.mpf
    kind: str
    at_floor: bool = False


@dataclass(frozen=True)
class ConvergenceRecord:
    entries: tuple
    precision: int

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def orders(self):
        return [e.N for e in self.entries]

    def deltas(self):
        return [e.delta for e in self.entries]


@lru_cache(maxsize=None)
def _inner_coefficients(N: int, n: int) -> tuple:
    """E_j * sum_{k=j+n}^{N} (-1)**(k+n) binom(h_j, k-j) binom(k-j, n), for j = 0..N-n."""
    weak = bender_wu(N)
    out = []
    for j in range(N - n + 1):
        s = mpq(0)
        for k in range(j + n, N + 1):
            term = half_binomial(j, k - j) * comb(k - j, n)
            s += term if (k + n) % 2 == 0 else -term
        out.append(weak[j] * s)
    return tuple(out)


def _alpha_exact_sum(weak: WeakSeries, N: int, n: int, ghat: mpq) -> mpq:
    if weak.max_order >= N and weak.coeffs[: N + 1] == bender_wu(N).coeffs:
        coeffs = _inner_coefficients(N, n)
    else:
        coeffs = []
        for j in range(N - n + 1):
            s = mpq(0)
            for k in range(j + n, N + 1):
                s += (-1) ** (k + n) * half_binomial(j, k - j) * comb(k - j, n)
            coeffs.append(weak[j] * s)
    x = -ghat / 4
    acc = mpq(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _sigma_rational(sigma, digits: int) -> mpq:
    if isinstance(sigma, SigmaOptimum):
        return sigma.as_rational(digits)
    if isinstance(sigma, (int, mpq)) or hasattr(sigma, "denominator"):
        return to_mpq(sigma)
    scale = 10**digits
    with mpmath.workdps(digits + 10):
        return mpq(int(mpmath.nint(mpmath.mpf(sigma) * scale)), scale)


def alpha(weak: WeakSeries, N: int, n: int, sigma, precision: int = 40) -> mpmath.mpf:
    """alpha_n of the order-N approximation evaluated at ghat = 1/sigma."""
    check_precision(precision)
    if n < 0 or n > N:
        raise ValueError(f"coefficient index must satisfy 0 <= n <= N, got n={n}, N={N}")
    if weak.max_order < N:
        raise ValueError(f"order {N} needs weak coefficients up to {N}, only {weak.max_order} available")
    s = _sigma_rational(sigma, precision + 10)
    if s <= 0:
        raise ValueError("sigma must be positive")
    ghat = 1 / s
    total = _alpha_exact_sum(weak, N, n, ghat)
    with mpmath.workdps(precision + 10):
        value = (to_mpf(ghat) / 4) ** (mpmath.mpf(2 * n - 1) / 3) * to_mpf(total)
    with mpmath.workdps(precision):
        return +value


def strong_coupling_series(
    N: int, n_max: int = 0, precision: int = 40, optimum: SigmaOptimum = None
) -> StrongCouplingSeries:
    """alpha_0 .. alpha_{n_max} at order N, all at the same sigma_N."""
    if n_max > N:
        raise ValueError(f"n_max={n_max} exceeds the order N={N}")
    opt = optimum or select_sigma(N, precision)
    weak = bender_wu(N)
    alphas = tuple(alpha(weak, N, n, opt, precision) for n in range(n_max + 1))
    with mpmath.workdps(precision):
        ghat = 1 / opt.sigma
    return StrongCouplingSeries(N, opt.sigma, alphas, precision, opt.kind, ghat)


def strong_eval(series: StrongCouplingSeries, spec: CouplingSpec, terms: int = None, precision: int = None):
    """Truncated strong-coupling series (g/4)**(1/3) sum_n alpha_n (4 omega**3/g)**(2n/3)."""
    terms = len(series.alphas) if terms is None else terms
    if terms < 1 or terms > len(series.alphas):
        raise ValueError(f"terms must lie in [1, {len(series.alphas)}], got {terms}")
    precision = precision or series.precision
    with mpmath.workdps(precision + 10):
        g, w = to_mpf(spec.g), to_mpf(spec.omega)
        x = (4 * w**3 / g) ** (mpmath.mpf(2) / 3)
        acc = mpmath.mpf(0)
        for a in reversed(series.alphas[:terms]):
            acc = acc * x + a
        value = mpmath.cbrt(g / 4) * acc
    with mpmath.workdps(precision):
        return +value


def delta_series(N_max: int, precision: int = 40, N_min: int = 1, audit: bool = False) -> ConvergenceRecord:
    """Delta_N = |(alpha_0)_N - alpha0_ref| for N_min <= N <= N_max."""
    if N_max < 1:
        raise ValueError(f"N_max must be at least 1, got {N_max}")
    precision = max(precision, len(REFERENCE.alpha0_ref) + 10)
    entries = []
    with mpmath.workdps(precision):
        ref = REFERENCE.alpha0
        floor = 10 * mpmath.mpf(10) ** (-precision)
    for N in range(max(1, N_min), N_max + 1):
        opt = select_sigma(N, precision)
        a0 = alpha(bender_wu(N), N, 0, opt, precision)
        if audit:
            check = alpha(bender_wu(N), N, 0, select_sigma(N, precision + 20), precision + 20)
            with mpmath.workdps(precision + 20):
                if abs(check - a0) > mpmath.mpf(10) ** (-precision + 1):
                    raise PrecisionError(f"alpha_0 at N={N} moved by {mpmath.nstr(abs(check - a0), 3)} at +20 digits")
        with mpmath.workdps(precision):
            d = abs(a0 - ref)
        entries.append(DeltaEntry(N, d, opt.kind, bool(d < floor)))
    return ConvergenceRecord(tuple(entries), precision)


def estimate_gs(series, n_range=None) -> float:
    """Radius |gbar_s| from the geometric decay of |alpha_n|.

    With |alpha_n| ~ C r**n, the series in x = (4/gbar)**(2/3) converges for
    |x| < 1/r, i.e. for |gbar| > |gbar_s| = 4 r**(3/2).
    """
    alphas = series.alphas if isinstance(series, StrongCouplingSeries) else tuple(series)
    lo, hi = n_range if n_range is not None else (1, len(alphas) - 1)
    idx = [n for n in range(lo, hi + 1) if n < len(alphas) and alphas[n] != 0]
    if len(alphas) < 12 or len(idx) < 3:
        raise ValueError("need at least 12 coefficients to estimate the convergence radius")
    xs = [float(n) for n in idx]
    ys = [float(mpmath.log(abs(alphas[n]))) for n in idx]
    xm, ym = sum(xs) / len(xs), sum(ys) / len(ys)
    slope = sum((x - xm) * (y - ym) for x, y in zip(xs, ys)) / sum((x - xm) ** 2 for x in xs)
    if slope >= 0:
        raise ValueError("|alpha_n| does not decay; the coefficients are not converged")
    r = mpmath.e ** slope
    return float(4 * r**1.5)


def alpha_table_csv(series: StrongCouplingSeries, digits: int = None) -> str:
    digits = digits or series.precision
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "alpha", "N", "sigma"])
    for n, a in enumerate(series.alphas):
        w.writerow([n, decimal_string(a, digits), series.order, decimal_string(series.sigma, digits)])
    return buf.getvalue()


def delta_table_csv(record: ConvergenceRecord, digits: int = 20) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "delta", "flag"])
    for e in record.entries:
        w.writerow([e.N, decimal_string(e.delta, digits), "floor" if e.at_floor else ""])
    return buf.getvalue()
