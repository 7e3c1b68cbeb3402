"""Exact weak-coupling coefficients of the quartic oscillator ground state.

Energy convention: E(g) = omega * sum_k E_k * (g / (4 omega**3))**k.

The coefficients come from the Bender-Wu recursion. Writing the ground state
as exp(-x**2/2) * sum_k (g/4)**k B_k(x) with B_k(x) = sum_m B[k][m] x**(2m)
(units omega = 1), the Schroedinger equation order by order gives, for m from
2k down to 1,

    2m B[k][m] = (m+1)(2m+1) B[k][m+1] - B[k-1][m-2] + sum_{j=1}^{k-1} E_j B[k-j][m]

and E_k = -B[k][1].  Everything is carried in gmpy2 rationals.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path

import mpmath
from gmpy2 import mpq

from ._numeric import to_mpq

CACHE_FORMAT = "anharmonic-weak-series"
CACHE_VERSION = 1


class CacheError(ValueError):
    """Raised when a coefficient cache file cannot be trusted."""


@dataclass(frozen=True)
class WeakSeries:
    """E_0 ... E_K of the weak-coupling expansion, as exact rationals."""

    coeffs: tuple

    @property
    def max_order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self) -> int:
        return len(self.coeffs)

    def truncate(self, K: int) -> "WeakSeries":
        if K > self.max_order:
            raise ValueError(f"series only carries orders up to {self.max_order}, asked for {K}")
        return WeakSeries(self.coeffs[: K + 1])


@dataclass(frozen=True)
class BenderWuTable:
    """Rows B[k][m]; row k has entries m = 0 .. 2k (B[0][0] = 1, B[k][0] = 0)."""

    rows: tuple

    def __getitem__(self, km):
        k, m = km
        row = self.rows[k]
        return row[m] if 0 <= m < len(row) else mpq(0)

    @property
    def max_order(self) -> int:
        return len(self.rows) - 1


class _BenderWuCache:
    # Readers take a snapshot of immutable tuples; only extension holds the lock.
    def __init__(self):
        self._lock = threading.Lock()
        self._energies = (mpq(1, 2),)
        self._rows = ((mpq(1),),)

    def ensure(self, K: int):
        if K < len(self._energies):
            return self._energies, self._rows
        with self._lock:
            energies = list(self._energies)
            rows = list(self._rows)
            for k in range(len(energies), K + 1):
                row = _sweep(k, energies, rows)
                rows.append(row)
                energies.append(-row[1])
            self._energies = tuple(energies)
            self._rows = tuple(rows)
            return self._energies, self._rows


def _sweep(k, energies, rows):
    """One descending sweep of the recursion for order k >= 1."""
    row = [mpq(0)] * (2 * k + 2)
    prev = rows[k - 1]
    for m in range(2 * k, 0, -1):
        acc = (m + 1) * (2 * m + 1) * row[m + 1]
        if 0 <= m - 2 < len(prev):
            acc -= prev[m - 2]
        # B[k-j][m] vanishes once m > 2(k-j)
        for j in range(1, k - (m + 1) // 2 + 1):
            acc += energies[j] * rows[k - j][m]
        row[m] = acc / (2 * m)
    return tuple(row[: 2 * k + 1])


_CACHE = _BenderWuCache()


def bender_wu(K: int) -> WeakSeries:
    """Exact coefficients E_0 .. E_K.

    >>> [str(c) for c in bender_wu(4).coeffs]
    ['1/2', '3/4', '-21/8', '333/16', '-30885/128']
    """
    if K < 0:
        raise ValueError(f"order must be non-negative, got {K}")
    energies, _ = _CACHE.ensure(K)
    return WeakSeries(energies[: K + 1])


def bender_wu_table(K: int) -> BenderWuTable:
    if K < 0:
        raise ValueError(f"order must be non-negative, got {K}")
    _, rows = _CACHE.ensure(K)
    return BenderWuTable(rows[: K + 1])


def large_order_asymptote(k: int, precision: int = 30) -> mpmath.mpf:
    """Leading large-order form -(1/pi) sqrt(6/pi) (-3)**k k**(-1/2) k!."""
    if k < 1:
        raise ValueError(f"the large-order formula needs k >= 1, got {k}")
    with mpmath.workdps(precision + 10):
        pi = mpmath.pi
        val = -(1 / pi) * mpmath.sqrt(6 / pi) * mpmath.mpf(-3) ** k * mpmath.factorial(k) / mpmath.sqrt(k)
    with mpmath.workdps(precision):
        return +val


def semiclassical_disc(g, omega=1, precision: int = 30) -> mpmath.mpf:
    """Im E(g - i0) on the negative-coupling cut, leading semiclassical order.

    disc E = 2i Im E with disc E ~ -2i omega sqrt(6/pi) sqrt(-4 omega**3/(3g)) exp(4 omega**3/(3g)).
    """
    with mpmath.workdps(precision + 10):
        g = mpmath.mpf(g)
        omega = mpmath.mpf(omega)
        if g >= 0:
            raise ValueError("the cut lies at negative coupling; need g < 0")
        if omega <= 0:
            raise ValueError("omega must be positive")
        u = 4 * omega**3 / (3 * g)
        val = -omega * mpmath.sqrt(6 / mpmath.pi) * mpmath.sqrt(-u) * mpmath.exp(u)
    with mpmath.workdps(precision):
        return +val


# -- coefficient cache file ---------------------------------------------------

def write_cache(path, series: WeakSeries) -> None:
    lines = [f"# {CACHE_FORMAT} v{CACHE_VERSION}", f"# max_order {series.max_order}"]
    for k, c in enumerate(series.coeffs):
        c = to_mpq(c)
        lines.append(f"{k} {int(c.numerator)}/{int(c.denominator)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_cache(path) -> WeakSeries:
    text = Path(path).read_text(encoding="ascii")
    lines = text.split("\n")
    if not lines or lines[0].strip() != f"# {CACHE_FORMAT} v{CACHE_VERSION}":
        raise CacheError(f"{path}: line 1: expected header '# {CACHE_FORMAT} v{CACHE_VERSION}', got {lines[0]!r}")
    if len(lines) < 2 or not lines[1].startswith("# max_order "):
        raise CacheError(f"{path}: line 2: missing max_order header")
    try:
        K = int(lines[1].split()[2])
    except (IndexError, ValueError):
        raise CacheError(f"{path}: line 2: malformed max_order header") from None
    coeffs = []
    for lineno, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        parts = line.split()
        try:
            k = int(parts[0])
            num, den = parts[1].split("/")
            c = mpq(int(num), int(den))
        except (IndexError, ValueError, ZeroDivisionError):
            raise CacheError(f"{path}: line {lineno}: cannot parse record {line!r}") from None
        if len(parts) != 2 or k != len(coeffs):
            raise CacheError(f"{path}: line {lineno}: expected record for order {len(coeffs)}")
        coeffs.append(c)
    if len(coeffs) != K + 1:
        raise CacheError(f"{path}: line {len(lines)}: truncated, found {len(coeffs)} of {K + 1} records")
    return WeakSeries(tuple(coeffs))


def verify_cache(path) -> int:
    """Re-read a cache file and compare it against the recursion; returns its max order."""
    stored = read_cache(path)
    fresh = bender_wu(stored.max_order)
    for k, (a, b) in enumerate(zip(stored.coeffs, fresh.coeffs)):
        if a != b:
            raise CacheError(f"{path}: order {k} differs from recomputed value")
    return stored.max_order


def load_or_compute(K: int, path=None) -> WeakSeries:
    """Use a cache file when it already reaches order K, otherwise recompute (and store)."""
    if path is not None and Path(path).exists():
        stored = read_cache(path)
        if stored.max_order >= K:
            return stored.truncate(K)
    series = bender_wu(K)
    if path is not None:
        write_cache(path, series)
    return series
