import logging
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy.stats import linregress

from exchange_kinetics.analysis.equilibrium import EquilibriumSpec
from exchange_kinetics.distribution.functionals import debt, mean
from exchange_kinetics.distribution.pmf import WealthPMF
from exchange_kinetics.mean_field.operators import bank_coefficients

logger = logging.getLogger(__name__)

MIN_DECAY_SAMPLES = 8
MEMBERSHIP_TOLERANCE = 1e-6


def _flux_entropy(forward: np.ndarray, backward: np.ndarray) -> float:
    """sum (f - b) log(f / b) over pairs where both are positive."""
    both = (forward > 0) & (backward > 0)
    f, b = forward[both], backward[both]
    return float(np.sum((f - b) * (np.log(f) - np.log(b))))


def entropy_dissipation_rate(p: WealthPMF, spec: EquilibriumSpec | None = None, lam: float = 1.0) -> float:
    """
    d/dt of the relative entropy to the equilibrium along the Phase II flow at p.
    r, d and p_0 are read from p; the value is exact for p with the equilibrium's
    mean and debt and is always <= 0.
    spec: EquilibriumSpec or None
        When given, a warning is logged if p does not share its mean and debt.
    """
    pp = p.covering(-1, 1)
    values = pp.values
    zero = pp.index_of(0)
    p0 = values[zero]
    r = values[zero + 1 :].sum()
    d = values[:zero].sum()
    bank_coefficients(p0, r, d)
    if spec is not None:
        off_mean = abs(mean(p) - spec.mu)
        off_debt = abs(debt(p) - spec.mu * spec.nu)
        if off_mean > MEMBERSHIP_TOLERANCE or off_debt > MEMBERSHIP_TOLERANCE:
            logger.warning(
                "p is off the equilibrium's affine space (mean off by %.3e, debt off by %.3e)",
                off_mean,
                off_debt,
            )

    right = 0.0
    if r > 0:
        # pairs (n, n + 1) for n >= 0
        above = values[zero + 1 :] / r
        here = values[zero:-1] / (r + p0)
        right = r * _flux_entropy(above, here)
    left = 0.0
    if d > 0:
        # pairs (n, n + 1) for n <= -1
        above = values[1 : zero + 1] / (d + p0)
        here = values[:zero] / d
        left = r * d / (r + p0) * _flux_entropy(above, here)
    return -lam * (right + left)


@dataclass(frozen=True)
class DecayFit:
    """D_KL(t) ~ c1 exp(-c2 sqrt(t)); rms is the root mean square residual of log D_KL."""

    c1: float
    c2: float
    rms: float

    def as_dict(self) -> dict:
        return asdict(self)

    def __call__(self, t: np.ndarray | float) -> np.ndarray:
        return self.c1 * np.exp(-self.c2 * np.sqrt(t))


def fit_sqrt_exponential_decay(times: Sequence[float], values: Sequence[float]) -> DecayFit:
    """Linear least squares of log D_KL against sqrt(t)."""
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if len(times) != len(values):
        raise ValueError("times and values must have equal length")
    if len(times) < MIN_DECAY_SAMPLES:
        raise ValueError(f"at least {MIN_DECAY_SAMPLES} samples are needed, got {len(times)}")
    if np.any(~(values > 0)):
        raise ValueError("relative entropy samples must be positive")
    x = np.sqrt(times)
    y = np.log(values)
    fit = linregress(x, y)
    residual = y - (fit.intercept + fit.slope * x)
    return DecayFit(
        c1=float(np.exp(fit.intercept)),
        c2=float(-fit.slope),
        rms=float(np.sqrt(np.mean(residual**2))),
    )
