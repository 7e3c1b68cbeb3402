"""Convergence model for the strong-coupling approximants.

The error of the N-th approximant behaves like

    Delta_N ~ prefactor * exp(-N**(1/3) a cos(theta)) * |cos(N**(1/3) a sin(theta) + phase)|

where a = (|gbar_s| c)**(-2/3) comes from the complex singularity pair nearest to
the origin of the strong-coupling expansion.  The phase is a fit-only extension.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from .strongcoupling import REFERENCE, ConvergenceRecord


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class CutConstants:
    b: float = REFERENCE.b
    c: float = REFERENCE.c
    gamma: float = REFERENCE.gamma

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("c must be positive")
        if not -1 < self.gamma < 0:
            raise ValueError("gamma must lie in (-1, 0)")


@dataclass(frozen=True)
class OscillationModel:
    a: float
    theta: float
    prefactor: float = 1.0
    phase: float = 0.0

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("a must be positive")

    @property
    def envelope_rate(self) -> float:
        return self.a * math.cos(self.theta)

    @property
    def frequency(self) -> float:
        return self.a * math.sin(self.theta)

    @classmethod
    def from_rates(cls, envelope, frequency, prefactor=1.0, phase=0.0):
        return cls(math.hypot(envelope, frequency), math.atan2(frequency, envelope), prefactor, phase)


@dataclass
class ModelFit:
    model: OscillationModel
    residual_norm: float
    used: list = field(default_factory=list)
    excluded: list = field(default_factory=list)

    def to_json(self) -> str:
        m = self.model
        payload = {
            "model": {**asdict(m), "envelope_rate": m.envelope_rate, "frequency": m.frequency},
            "residual_norm": self.residual_norm,
            "used": self.used,
            "excluded": self.excluded,
        }
        return json.dumps(payload, indent=2, sort_keys=True)


@dataclass
class SigmaLawFit:
    c: float
    b: float
    residual_norm: float
    orders: list = field(default_factory=list)


def predicted_exponent(k: CutConstants, g: float = math.inf) -> float:
    """Decay exponent -b ln(-gamma) + (c g)**(-2/3) of the C_1 contribution."""
    if k.gamma >= 0:
        raise ValueError("gamma must be negative")
    base = -k.b * math.log(-k.gamma)
    if math.isinf(g):
        return base
    if g <= 0:
        raise ValueError("coupling must be positive")
    return base + (k.c * g) ** (-2 / 3)


def oscillation_scale(gbar_s_abs: float, c: float) -> float:
    if gbar_s_abs <= 0 or c <= 0:
        raise ValueError("both |gbar_s| and c must be positive")
    return (gbar_s_abs * c) ** (-2 / 3)


def predict_delta(model: OscillationModel, N) -> float:
    u = N ** (1 / 3)
    return model.prefactor * math.exp(-u * model.envelope_rate) * abs(math.cos(u * model.frequency + model.phase))


def published_model(prefactor: float = 1.0) -> OscillationModel:
    return OscillationModel(oscillation_scale(REFERENCE.gbar_s_abs, REFERENCE.c), REFERENCE.theta, prefactor)


def _linear_part(u, y, freq, phase):
    # y - log|cos| = log(prefactor) - u * envelope, solved in closed form
    logcos = np.log(np.abs(np.cos(np.multiply.outer(freq, u) + phase[..., None])) + 1e-300)
    t = y - logcos
    um = u.mean()
    du = u - um
    slope = (t - t.mean(axis=-1, keepdims=True)) @ du / (du @ du)
    intercept = t.mean(axis=-1) - slope * um
    resid = t - (intercept[..., None] + slope[..., None] * u)
    return -slope, intercept, np.sqrt((resid**2).sum(axis=-1))


def fit_model(record, N_range=(8, 80), min_points: int = 10, freq_bounds=(-20.0, 0.0)) -> ModelFit:
    """Least-squares fit of log Delta_N to the oscillation model.

    The prefactor and envelope rate enter linearly and are eliminated; the
    frequency a sin(theta) and phase are found by a grid scan followed by a
    Nelder-Mead polish.  Entries flagged at the precision floor, or within a
    factor 10 of it, are excluded.
    """
    lo, hi = N_range
    if isinstance(record, ConvergenceRecord):
        floor = 10.0 ** (-record.precision)
        rows = [(e.N, float(e.delta), e.at_floor) for e in record.entries]
    else:
        floor = 0.0
        rows = [(int(n), float(d), False) for n, d in record]
    used, excluded = [], []
    for n, d, flagged in rows:
        if not lo <= n <= hi:
            continue
        if flagged or d <= 10 * floor or d <= 0:
            excluded.append(n)
        else:
            used.append((n, d))
    if len(used) < min_points:
        raise FitError(f"only {len(used)} usable points in N range {N_range}, need {min_points}")
    N = np.array([n for n, _ in used], dtype=float)
    u = N ** (1 / 3)
    y = np.log([d for _, d in used])

    freqs = np.linspace(freq_bounds[0], freq_bounds[1], 401)
    phases = np.linspace(0.0, math.pi, 90, endpoint=False)
    F, P = np.meshgrid(freqs, phases, indexing="ij")
    _, _, norms = _linear_part(u, y, F, P)
    if not np.all(np.isfinite(norms)):
        norms = np.where(np.isfinite(norms), norms, np.inf)

    def objective(x):
        f = np.clip(x[0], *freq_bounds)
        return float(_linear_part(u, y, np.array(f), np.array(x[1]))[2])

    best = None
    for flat in np.argsort(norms, axis=None)[:8]:
        i, j = np.unravel_index(flat, norms.shape)
        res = minimize(objective, [F[i, j], P[i, j]], method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
        if best is None or res.fun < best.fun:
            best = res
    freq = float(np.clip(best.x[0], *freq_bounds))
    phase = float(best.x[1]) % math.pi
    env, intercept, norm = _linear_part(u, y, np.array(freq), np.array(phase))
    env = float(env)
    if not np.isfinite(norm) or env <= 0:
        raise FitError("fit did not find a decaying envelope")
    model = OscillationModel.from_rates(env, freq, math.exp(float(intercept)), phase)
    return ModelFit(model, float(norm), [n for n, _ in used], excluded)


def fit_sigma_law(sigmas, N_range=(10, 60), min_points: int = 10) -> SigmaLawFit:
    """Fit sigma_N = c N (1 + b / N**(2/3)), linear in (c, c b)."""
    lo, hi = N_range
    pts = []
    for s in sigmas:
        n, value = (s.order, float(s.sigma)) if hasattr(s, "order") else (int(s[0]), float(s[1]))
        if lo <= n <= hi:
            pts.append((n, value))
    if len(pts) < min_points:
        raise FitError(f"only {len(pts)} optima in N range {N_range}, need {min_points}")
    N = np.array([p[0] for p in pts], dtype=float)
    y = np.array([p[1] for p in pts])
    A = np.column_stack([N, N ** (1 / 3)])
    (c, cb), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ np.array([c, cb])
    return SigmaLawFit(float(c), float(cb / c), float(np.linalg.norm(resid)), [int(n) for n in N])
