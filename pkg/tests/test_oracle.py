import mpmath
import numpy as np
import pytest

from anharmonic.oracle import (
    BasisConfig,
    NotConverged,
    count_below,
    dense_matrix,
    ground_energy,
    hamiltonian_elements,
    lowest_eigenvalue,
)
from anharmonic.reexpand import CouplingSpec
from anharmonic.strongcoupling import REFERENCE, strong_coupling_series, strong_eval


def hermite_function(n, x, w):
    """Normalized harmonic-oscillator eigenfunction of frequency w."""
    norm = (w / mpmath.pi) ** 0.25 / mpmath.sqrt(2**n * mpmath.factorial(n))
    return norm * mpmath.hermite(n, mpmath.sqrt(w) * x) * mpmath.exp(-w * x**2 / 2)


def test_harmonic_diagonal():
    diag, first, second = hamiltonian_elements(CouplingSpec(mpmath.mpf(10) ** -40, 2), BasisConfig(8, 2))
    for i, d in enumerate(diag):
        assert abs(d - 2 * (2 * i + mpmath.mpf(1) / 2)) < 1e-30
    assert all(abs(x) < 1e-30 for x in first + second)


def test_band_shapes_and_symmetry():
    bands = hamiltonian_elements(CouplingSpec(1, 1), BasisConfig(10))
    assert [len(b) for b in bands] == [10, 9, 8]
    H = dense_matrix(bands)
    assert H == H.T
    assert H[0, 3] == 0


@pytest.mark.parametrize("n", [0, 2, 4, 6])
def test_x4_diagonal_by_quadrature(n):
    w = mpmath.mpf("1.7")
    with mpmath.workdps(25):
        quad = mpmath.quad(lambda x: hermite_function(n, x, w) ** 2 * x**4, [-mpmath.inf, 0, mpmath.inf])
        assert abs(quad - 3 * mpmath.mpf(2 * n * n + 2 * n + 1) / (4 * w**2)) < 1e-18


@pytest.mark.parametrize("n", [0, 2, 4])
def test_full_elements_by_quadrature(n):
    # <n|H|n+2> and <n|H|n+4> with p**2 from the basis equation
    with mpmath.workdps(25):
        g, omega, w = mpmath.mpf("0.8"), mpmath.mpf("1.3"), mpmath.mpf("1.6")
        V = lambda x: (omega**2 - w**2) * x**2 / 2 + g * x**4 / 4  # noqa: E731
        diag, first, second = hamiltonian_elements(CouplingSpec("0.8", "1.3"), BasisConfig(6, w))
        for m, band in ((n + 2, first), (n + 4, second)):
            q = mpmath.quad(lambda x: hermite_function(n, x, w) * V(x) * hermite_function(m, x, w),
                            [-mpmath.inf, 0, mpmath.inf])
            assert abs(q - band[n // 2]) < 1e-18


def test_free_oscillator_energy():
    res = ground_energy(CouplingSpec(mpmath.mpf(10) ** -60, 3), BasisConfig(16, 3), 30)
    assert abs(res.energy - mpmath.mpf(3) / 2) < mpmath.mpf(10) ** -29


def test_regression_value():
    res = ground_energy(CouplingSpec("0.4", 1), BasisConfig(200), 30)
    assert float(res.energy) == pytest.approx(0.5591463, abs=1e-7)
    assert res.convergence_gap < 1e-10
    assert res.basis_size == 200


def test_matches_dense_double_precision():
    spec = CouplingSpec(5, 1)
    bands = hamiltonian_elements(spec, BasisConfig(40))
    H = np.array(dense_matrix(bands).tolist(), dtype=float)
    assert float(lowest_eigenvalue(bands, 20)) == pytest.approx(np.linalg.eigvalsh(H)[0], rel=1e-12)


def test_inertia_count():
    bands = hamiltonian_elements(CouplingSpec(2, 1), BasisConfig(30))
    H = np.array(dense_matrix(bands).tolist(), dtype=float)
    ev = np.linalg.eigvalsh(H)
    for lam in (ev[0] - 1, (ev[0] + ev[1]) / 2, (ev[4] + ev[5]) / 2, ev[-1] + 1):
        with mpmath.workdps(30):
            assert count_below(bands, mpmath.mpf(lam)) == int((ev < lam).sum())


def test_monotone_in_basis_size():
    # a larger basis contains the smaller one: variational upper bounds
    spec = CouplingSpec(50, 1)
    energies = [ground_energy(spec, BasisConfig(M, 1), 25).energy for M in (8, 16, 32, 64)]
    assert all(b <= a for a, b in zip(energies, energies[1:]))


def test_basis_frequency_independence():
    spec = CouplingSpec("0.4", 1)
    a = ground_energy(spec, BasisConfig(200, 1), 30)
    b = ground_energy(spec, BasisConfig(200, mpmath.cbrt(mpmath.mpf("1.4"))), 30)
    assert abs(a.energy - b.energy) <= max(a.convergence_gap, b.convergence_gap, mpmath.mpf(10) ** -25)


@pytest.mark.parametrize("g,omega", [("3", "2"), ("0.5", "0.5"), ("100", "3")])
def test_scaling_law(g, omega):
    spec = CouplingSpec(g, omega)
    scaled = CouplingSpec(spec.g / spec.omega**3, 1)
    lhs = ground_energy(spec, BasisConfig(120), 25).energy
    rhs = ground_energy(scaled, BasisConfig(120), 25).energy
    with mpmath.workdps(25):
        assert abs(lhs - mpmath.mpf(omega) * rhs) < mpmath.mpf(10) ** -20


def test_not_converged_reports_result():
    with pytest.raises(NotConverged) as info:
        ground_energy(CouplingSpec(1000, 1), BasisConfig(6, 1), 20, tolerance=1e-12)
    assert info.value.result.convergence_gap > 1e-12


def test_invalid_basis():
    with pytest.raises(ValueError):
        BasisConfig(3)
    with pytest.raises(ValueError):
        BasisConfig(10, -1)


def test_strong_coupling_cross_check():
    spec = CouplingSpec(2000, 1)
    E = ground_energy(spec, BasisConfig(400), 30).energy
    series = strong_coupling_series(40, 8, 40)
    with mpmath.workdps(30):
        leading = mpmath.cbrt(mpmath.mpf(500)) * REFERENCE.alpha0
        # the omega**2 term shifts the energy by about (g/4)**(1/3) alpha_1 (4/g)**(2/3)
        assert abs(E - leading) < 2 * mpmath.cbrt(mpmath.mpf(500)) * series.alphas[1] * (mpmath.mpf(4) / 2000) ** (
            mpmath.mpf(2) / 3)
        assert abs(strong_eval(series, spec, 6) / E - 1) < mpmath.mpf(10) ** -6
