import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from exchange_kinetics.distribution.pmf import WealthPMF

logger = logging.getLogger(__name__)

EQUILIBRIUM_TAIL_MASS = 1e-16


@dataclass(frozen=True)
class EquilibriumSpec:
    """
    Unique equilibrium of the Phase II dynamics with mean mu and average debt mu*nu:
    a two-sided geometric law p*_n = ratio_right**n p0_star for n >= 0 and
    ratio_left**(-n) p0_star for n <= 0.
    """

    mu: float
    nu: float
    p0_star: float
    r_star: float
    d_star: float
    ratio_right: float
    ratio_left: float

    def probabilities(self, n: np.ndarray | int) -> np.ndarray:
        """Closed-form p*_n at arbitrary integers."""
        n = np.asarray(n, dtype=np.float64)
        right = self.p0_star * self.ratio_right ** np.maximum(n, 0.0)
        left = self.p0_star * self.ratio_left ** np.maximum(-n, 0.0)
        return np.where(n >= 0, right, left)

    def decay_rates(self) -> tuple[float, float]:
        """Exact log-decay rates of the right and left tails; the left one is inf when nu = 0."""
        right = math.log((self.r_star + self.p0_star) / self.r_star)
        left = math.inf if self.d_star == 0 else math.log((self.d_star + self.p0_star) / self.d_star)
        return right, left

    def window(self, tail_mass: float = EQUILIBRIUM_TAIL_MASS) -> tuple[int, int]:
        """Smallest window outside which each tail carries less than `tail_mass`."""
        return -_tail_length(self.ratio_left, self.p0_star, tail_mass), _tail_length(
            self.ratio_right, self.p0_star, tail_mass
        )

    def as_dict(self) -> dict:
        return asdict(self)


def _tail_length(ratio: float, p0: float, tail_mass: float) -> int:
    # mass beyond slot k is p0 ratio**(k+1) / (1 - ratio)
    if ratio <= 0.0:
        return 0
    k = math.log(tail_mass * (1.0 - ratio) / p0) / math.log(ratio) - 1.0
    return max(0, math.ceil(k))


def equilibrium_spec(mu: float, nu: float) -> EquilibriumSpec:
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu!r}")
    if not nu >= 0:
        raise ValueError(f"nu must be non-negative, got {nu!r}")
    # rationalized p*_0, continuous through mu = 1 where it equals 1 / (4 nu + 2)
    p0 = 1.0 / (2.0 * (mu * (nu + 0.5) + math.sqrt(mu**2 * nu**2 + mu**2 * nu + 0.25)))
    r = ((mu - 1.0) * p0 + 1.0) / 2.0
    # stable root of d (d + p0) = p0 mu nu
    d = 2.0 * p0 * mu * nu / (p0 + math.sqrt(p0**2 + 4.0 * p0 * mu * nu))
    return EquilibriumSpec(
        mu=float(mu),
        nu=float(nu),
        p0_star=p0,
        r_star=r,
        d_star=d,
        ratio_right=r / (r + p0),
        ratio_left=d / (d + p0),
    )


def equilibrium_pmf(
    mu: float,
    nu: float,
    n_min: int | None = None,
    n_max: int | None = None,
    tail_mass: float = EQUILIBRIUM_TAIL_MASS,
) -> tuple[EquilibriumSpec, WealthPMF]:
    """
    Equilibrium law on a window whose truncated tails each carry less than `tail_mass`.
    n_min, n_max: int or None
        Explicit window bounds; they override the automatic ones.
    nu = 0 gives the one-sided geometric law of the model without bank.
    """
    spec = equilibrium_spec(mu, nu)
    lo, hi = spec.window(tail_mass)
    lo = lo if n_min is None else n_min
    hi = hi if n_max is None else n_max
    if hi < lo:
        raise ValueError(f"empty window [{lo}, {hi}]")
    support = np.arange(lo, hi + 1)
    return spec, WealthPMF.from_weights(lo, spec.probabilities(support))


@dataclass(frozen=True)
class LaplaceParams:
    """Asymmetric Laplace approximation rho0 exp(-alpha x) for x > 0, rho0 exp(beta x) for x < 0."""

    rho0: float
    alpha: float
    beta: float

    def as_dict(self) -> dict:
        return asdict(self)


def laplace_params(mu: float, nu: float) -> LaplaceParams:
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu!r}")
    if not nu > 0:
        raise ValueError(f"nu must be positive, the left decay rate diverges as nu -> 0 (got {nu!r})")
    a = math.sqrt(1.0 + nu)
    b = math.sqrt(nu)
    return LaplaceParams(
        rho0=(a - b) ** 2 / mu,
        alpha=(1.0 - b / a) / mu,
        beta=(a / b - 1.0) / mu,
    )
