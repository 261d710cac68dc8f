"""
Right-hand sides of the mean-field equations.

The `*_rates` kernels act on a dense window and read neighbours outside it as zero;
the integrator uses them directly. The public `*_apply` functions first widen the
window by one slot on each side, so the returned rate vector carries all of the
outgoing flow and sums to zero exactly.
"""

import numpy as np

from exchange_kinetics.distribution.functionals import debt
from exchange_kinetics.distribution.pmf import RateVector, WealthPMF
from exchange_kinetics.exceptions import DegenerateDistributionError

DEGENERATE_DENOMINATOR = 1e-300


def _neighbours(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(p_{n-1}, p_{n+1}) on the same window."""
    below = np.empty_like(values)
    above = np.empty_like(values)
    below[0] = 0.0
    below[1:] = values[:-1]
    above[-1] = 0.0
    above[:-1] = values[1:]
    return below, above


def bank_coefficients(p0: float, r: float, d: float) -> tuple[float, float]:
    """
    (r / (r + p_0), r d / ((r + p_0)(d + p_0))): the rate at which an agent receives,
    and the rate at which an agent with S <= 0 manages to give.
    """
    den_r = r + p0
    den_d = d + p0
    if den_r < DEGENERATE_DENOMINATOR or den_d < DEGENERATE_DENOMINATOR:
        raise DegenerateDistributionError(
            f"degenerate distribution: r + p_0 = {den_r!r}, d + p_0 = {den_d!r}"
        )
    return r / den_r, r * d / (den_r * den_d)


def q1_rates(values: np.ndarray) -> np.ndarray:
    below, above = _neighbours(values)
    return above + below - 2.0 * values


def q2_rates(values: np.ndarray, zero: int) -> np.ndarray:
    """
    values: np.ndarray
        PMF on a window containing wealth 0.
    zero: int
        Index of wealth 0 in `values`.
    """
    p0 = values[zero]
    r = values[zero + 1 :].sum()
    d = values[:zero].sum()
    a, b = bank_coefficients(p0, r, d)
    below, above = _neighbours(values)
    out = np.empty_like(values)
    out[zero + 1 :] = above[zero + 1 :] + a * below[zero + 1 :] - (1.0 + a) * values[zero + 1 :]
    out[zero] = above[zero] + a * below[zero] - (a + b) * p0
    out[:zero] = b * above[:zero] + a * below[:zero] - (a + b) * values[:zero]
    return out


def q_vanilla_rates(values: np.ndarray) -> np.ndarray:
    """values[0] is wealth 0; there is no negative wealth."""
    r_bar = values[1:].sum()
    below, above = _neighbours(values)
    out = above + r_bar * below - (1.0 + r_bar) * values
    out[0] = values[1] - r_bar * values[0] if len(values) > 1 else 0.0
    return out


def q1_apply(p: WealthPMF) -> RateVector:
    """Q1[p]_n = p_{n+1} + p_{n-1} - 2 p_n: free symmetric random walk of Phase I."""
    pp = p.padded(1, 1)
    return RateVector(pp.offset, q1_rates(pp.values))


def q2_apply(p: WealthPMF) -> RateVector:
    """Phase II operator with r = P(S >= 1), d = P(S <= -1) read from p."""
    pp = p.padded(1, 1).covering(-1, 1)
    return RateVector(pp.offset, q2_rates(pp.values, pp.index_of(0)))


def _non_negative_part(q: WealthPMF) -> WealthPMF:
    if q.n_min >= 0:
        return q
    k = q.index_of(0)
    if np.any(q.values[:k] > 0):
        raise ValueError("the model without bank has no negative wealth")
    if k >= len(q):
        raise ValueError("the model without bank has no negative wealth")
    return WealthPMF(0, q.values[k:], q.tail_threshold)


def q_vanilla_apply(q: WealthPMF) -> RateVector:
    """Operator of the model without bank (nu = 0), r_bar = P(S >= 1)."""
    qq = _non_negative_part(q).covering(0, q.n_max + 1)
    return RateVector(0, q_vanilla_rates(qq.values))


def q_tilde_apply(p: WealthPMF) -> RateVector:
    """
    Phase II operator written through the fast bank process: q_0 is the probability
    that the bank holds no cash and gamma = r + (d + p_0)(1 - q_0) the receiving rate.
    Coincides with q2_apply.
    """
    pp = p.padded(1, 1).covering(-1, 1)
    values = pp.values
    zero = pp.index_of(0)
    p0 = values[zero]
    r = values[zero + 1 :].sum()
    d = values[:zero].sum()
    bank_coefficients(p0, r, d)
    q0 = p0 / ((r + p0) * (d + p0))
    gamma = r + (d + p0) * (1.0 - q0)
    below, above = _neighbours(values)
    out = np.empty_like(values)
    out[zero + 1 :] = (above - values)[zero + 1 :] + gamma * (below - values)[zero + 1 :]
    out[zero] = above[zero] - (1.0 - q0) * p0 + gamma * (below[zero] - p0)
    out[:zero] = (1.0 - q0) * (above - values)[:zero] + gamma * (below - values)[:zero]
    return RateVector(pp.offset, out)


def bank_cash_stationary_law(p: WealthPMF, n_max: int = 1000) -> WealthPMF:
    """
    Stationary law of the bank cash when the agents' law is p (Phase II):
    geometric with ratio r d / ((r + p_0)(d + p_0)), truncated at n_max and renormalized.
    """
    pp = p.covering(-1, 1)
    zero = pp.index_of(0)
    p0 = pp.values[zero]
    _, ratio = bank_coefficients(p0, pp.values[zero + 1 :].sum(), pp.values[:zero].sum())
    return WealthPMF.from_weights(0, ratio ** np.arange(n_max + 1))


def debt_rate(p: WealthPMF) -> float:
    """dD/dt under Q1; equals p_0."""
    return debt(q1_apply(p))
