"""Reference ground-state energies by direct diagonalization.

H = p**2/2 + omega**2 x**2/2 + (g/4) x**4 in the even states |0>, |2>, |4>, ...
of a harmonic oscillator with frequency omega_b.  The matrix is pentadiagonal
in the even-state index.  A double-precision eigenvalue seeds a bracket that is
then narrowed by bisection on the LDL^T inertia count in mpmath, so the final
value does not depend on LAPACK accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.linalg import eig_banded

from ._numeric import check_precision, to_mpf
from .reexpand import CouplingSpec


class NotConverged(ArithmeticError):
    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class BasisConfig:
    size: int = 200
    basis_frequency: object = None

    def __post_init__(self):
        if self.size < 4:
            raise ValueError(f"basis needs at least 4 states, got {self.size}")
        if self.basis_frequency is not None and self.basis_frequency <= 0:
            raise ValueError("basis frequency must be positive")

    def frequency(self, spec: CouplingSpec):
        if self.basis_frequency is not None:
            return mpmath.mpf(self.basis_frequency)
        return mpmath.cbrt(to_mpf(spec.omega) ** 3 + 3 * to_mpf(spec.g))


@dataclass(frozen=True)
class EigenResult:
    energy: mpmath.mpf
    basis_size: int
    convergence_gap: mpmath.mpf


def hamiltonian_elements(spec: CouplingSpec, cfg: BasisConfig):
    """Bands (diag, first, second) of the even-parity block, as mpf lists.

    first[i] couples states 2i and 2i+2, second[i] couples 2i and 2i+4.
    """
    wb = cfg.frequency(spec)
    w2 = to_mpf(spec.omega) ** 2
    g4 = to_mpf(spec.g) / 4
    shift = (w2 - wb**2) / 2
    M = cfg.size
    diag, first, second = [], [], []
    for i in range(M):
        n = 2 * i
        x2 = mpmath.mpf(2 * n + 1) / (2 * wb)
        x4 = 3 * mpmath.mpf(2 * n * n + 2 * n + 1) / (4 * wb**2)
        diag.append(wb * (n + mpmath.mpf(1) / 2) + shift * x2 + g4 * x4)
        if i + 1 < M:
            r = mpmath.sqrt((n + 1) * (n + 2))
            first.append(shift * r / (2 * wb) + g4 * (2 * n + 3) * r / (2 * wb**2))
        if i + 2 < M:
            r = mpmath.sqrt((n + 1) * (n + 2) * (n + 3) * (n + 4))
            second.append(g4 * r / (4 * wb**2))
    return diag, first, second


def dense_matrix(bands):
    diag, first, second = bands
    M = len(diag)
    H = mpmath.zeros(M, M)
    for i in range(M):
        H[i, i] = diag[i]
        if i + 1 < M:
            H[i, i + 1] = H[i + 1, i] = first[i]
        if i + 2 < M:
            H[i, i + 2] = H[i + 2, i] = second[i]
    return H


def count_below(bands, lam) -> int:
    """Number of eigenvalues below lam (negative pivots of LDL^T of H - lam)."""
    diag, first, second = bands
    M = len(diag)
    tiny = mpmath.mpf(10) ** (-mpmath.mp.dps - 5)
    D = [mpmath.mpf(0)] * M
    L1 = [mpmath.mpf(0)] * M  # L[k+1][k]
    L2 = [mpmath.mpf(0)] * M  # L[k+2][k]
    neg = 0
    for k in range(M):
        d = diag[k] - lam
        if k >= 1:
            d -= L1[k - 1] ** 2 * D[k - 1]
        if k >= 2:
            d -= L2[k - 2] ** 2 * D[k - 2]
        if d == 0:
            d = tiny
        D[k] = d
        if d < 0:
            neg += 1
        if k + 1 < M:
            a = first[k]
            if k >= 1:
                a -= L2[k - 1] * L1[k - 1] * D[k - 1]
            L1[k] = a / d
        if k + 2 < M:
            L2[k] = second[k] / d
    return neg


def _float_lowest(bands) -> float:
    diag, first, second = bands
    M = len(diag)
    ab = np.zeros((3, M))
    ab[0, :] = [float(x) for x in diag]
    ab[1, : M - 1] = [float(x) for x in first]
    ab[2, : M - 2] = [float(x) for x in second]
    vals = eig_banded(ab, lower=True, eigvals_only=True, select="i", select_range=(0, 0))
    return float(vals[0])


def lowest_eigenvalue(bands, precision: int = 30):
    with mpmath.workdps(2 * precision):
        seed = mpmath.mpf(_float_lowest(bands))
        width = mpmath.mpf(1e-8) * max(1, abs(seed))
        lo, hi = seed - width, seed + width
        while count_below(bands, lo) > 0:
            lo -= 2 * (hi - lo)
        while count_below(bands, hi) < 1:
            hi += 2 * (hi - lo)
        tol = mpmath.mpf(10) ** (-precision - 3) * max(1, abs(seed))
        while hi - lo > tol:
            mid = (lo + hi) / 2
            if count_below(bands, mid) >= 1:
                hi = mid
            else:
                lo = mid
        value = (lo + hi) / 2
    with mpmath.workdps(precision):
        return +value


def ground_energy(spec: CouplingSpec, cfg: BasisConfig = None, precision: int = 30, tolerance=None) -> EigenResult:
    """Lowest even-parity eigenvalue; the gap to the half-size basis is always reported.

    With a tolerance, a gap above it raises NotConverged carrying the result.
    """
    check_precision(precision)
    cfg = cfg or BasisConfig()
    with mpmath.workdps(2 * precision):
        full = lowest_eigenvalue(hamiltonian_elements(spec, cfg), precision)
        half_cfg = BasisConfig(max(4, cfg.size // 2), cfg.basis_frequency)
        half = lowest_eigenvalue(hamiltonian_elements(spec, half_cfg), precision)
        gap = abs(full - half)
    with mpmath.workdps(precision):
        result = EigenResult(+full, cfg.size, +gap)
    if tolerance is not None and gap > tolerance:
        raise NotConverged(f"basis gap {mpmath.nstr(gap, 3)} exceeds tolerance {tolerance}", result)
    return result
