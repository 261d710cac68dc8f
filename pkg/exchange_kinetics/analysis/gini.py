"""
Gini index diagnostics along the mean-field dynamics.
"""

from dataclasses import replace

import pandas as pd

from exchange_kinetics.distribution.functionals import gini, mean, tie_probability
from exchange_kinetics.distribution.params import ModelParams
from exchange_kinetics.distribution.pmf import WealthPMF
from exchange_kinetics.mean_field.integrator import IntegratorConfig, integrate_two_phase
from exchange_kinetics.mean_field.operators import q1_rates


def gini_phase1_derivative_check(p: WealthPMF, dt: float = 1e-6, lam: float = 1.0) -> tuple[float, float]:
    """
    Checks dG/dt = 2 lam z_0 / mu along the Phase I flow.
    Returns (lhs, rhs): the forward difference of the Gini index along one Euler step of
    the Phase I flow, and 2 lam z_0 / mu with z_0 = sum p_n^2 the probability that two
    independent copies tie. The difference of two copies leaves 0 at rate 4 lam, so
    E|S - S'| grows at 4 lam z_0.
    """
    if not 0 < dt < 1.0 / (2.0 * lam):
        raise ValueError("dt must lie in (0, 1 / (2 lam))")
    pp = p.padded(1, 1)
    values = pp.values + dt * lam * q1_rates(pp.values)
    stepped = WealthPMF.from_weights(pp.offset, values, p.tail_threshold)
    lhs = (gini(stepped) - gini(p)) / dt
    rhs = 2.0 * lam * tie_probability(p) / mean(p)
    return lhs, rhs


def compare_gini_vs_vanilla(
    mu: float,
    nu: float,
    t_end: float,
    cfg: IntegratorConfig | None = None,
    p0: WealthPMF | None = None,
    lam: float = 1.0,
) -> pd.DataFrame:
    """
    Gini index over time for the model with bank and for the model without bank
    (nu = 0), started from the same PMF (default: mass at mu).
    Columns t, gini_banked, gini_vanilla, difference; attrs["t_star"] holds the switch time.
    """
    if cfg is None:
        cfg = IntegratorConfig(dt=IntegratorConfig.default_dt(lam), t_end=t_end)
    else:
        cfg = replace(cfg, t_end=t_end)
    if p0 is None:
        p0 = WealthPMF.point_mass_at_mean(mu)
    banked = integrate_two_phase(p0, ModelParams(1, mu, nu, lam), cfg)
    vanilla = integrate_two_phase(p0, ModelParams(1, mu, 0.0, lam), cfg)

    frame = pd.DataFrame(
        {
            "t": banked.trajectory["t"].to_numpy(),
            "gini_banked": banked.trajectory["gini"].to_numpy(),
            "gini_vanilla": vanilla.trajectory["gini"].to_numpy(),
        }
    )
    frame["difference"] = frame["gini_banked"] - frame["gini_vanilla"]
    frame.attrs["t_star"] = banked.t_star
    return frame
