"""Variational perturbation theory for the quartic anharmonic oscillator.

Turns the divergent weak-coupling series of the ground-state energy into
convergent strong-coupling approximations, with exact rational arithmetic
wherever the construction allows it.
"""

__version__ = "0.1.0"

from .exactseries import (
    WeakSeries,
    bender_wu,
    large_order_asymptote,
    semiclassical_disc,
)
from .optimize import (
    SigmaOptimum,
    critical_polynomial,
    omega_from_sigma,
    real_roots,
    select_sigma,
)
from .oracle import BasisConfig, ground_energy
from .reexpand import (
    CouplingSpec,
    ReexpandedSeries,
    SigmaPolynomial,
    epsilon_polys,
    w_n_eval,
)
from .strongcoupling import (
    REFERENCE,
    alpha,
    delta_series,
    estimate_gs,
    strong_coupling_series,
    strong_eval,
)

__all__ = [
    "BasisConfig",
    "CouplingSpec",
    "REFERENCE",
    "ReexpandedSeries",
    "SigmaOptimum",
    "SigmaPolynomial",
    "WeakSeries",
    "alpha",
    "bender_wu",
    "critical_polynomial",
    "delta_series",
    "epsilon_polys",
    "estimate_gs",
    "ground_energy",
    "large_order_asymptote",
    "omega_from_sigma",
    "real_roots",
    "select_sigma",
    "semiclassical_disc",
    "strong_coupling_series",
    "strong_eval",
    "w_n_eval",
]
