import math
from dataclasses import dataclass

from exchange_kinetics.analysis.equilibrium import equilibrium_spec


@dataclass(frozen=True)
class LinearizationReport:
    """
    Constants of the linearized Phase II dynamics around the equilibrium.
    The linearized entropy decays exponentially when margin > 0.
    """

    mu: float
    nu: float
    c1: float
    c2: float
    c3: float
    c4: float
    gamma: float
    margin: float

    @property
    def in_g(self) -> bool:
        return self.margin > 0

    def as_dict(self) -> dict:
        return {
            "mu": self.mu,
            "nu": self.nu,
            "C1": self.c1,
            "C2": self.c2,
            "C3": self.c3,
            "C4": self.c4,
            "gamma": self.gamma,
            "margin": self.margin,
            "in_G": self.in_g,
        }


def linearization_report(mu: float, nu: float) -> LinearizationReport:
    if not nu > 0:
        raise ValueError(f"nu must be positive, got {nu!r}")
    spec = equilibrium_spec(mu, nu)
    p0, r, d = spec.p0_star, spec.r_star, spec.d_star

    c3 = (
        r / (2 * r + p0)
        + r * d**2 / ((2 * d + p0) * (r + p0) ** 2)
        + r * d / ((r + p0) * (2 * d + p0))
        + r**3 * d / ((r + p0) * (2 * r + p0) * (d + p0) ** 2)
    )
    c1 = 1.0 - r * d / ((r + p0) * (d + p0)) - c3

    right = (1.0 - math.sqrt(r / (r + p0))) ** 2
    left = r / (r + p0) * (1.0 - math.sqrt(d / (d + p0))) ** 2
    c2, c4 = max(right, left), min(right, left)

    x = r**2 / (2 * r + p0) + d**2 / (2 * d + p0)
    gamma = x / (p0 + x)

    margin = c4 - c3 - (gamma * (c1 - c2) if c1 > c2 else 0.0)
    return LinearizationReport(
        mu=float(mu), nu=float(nu), c1=c1, c2=c2, c3=c3, c4=c4, gamma=gamma, margin=margin
    )
