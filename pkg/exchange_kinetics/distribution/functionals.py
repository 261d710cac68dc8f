import numpy as np
from scipy.special import rel_entr

from exchange_kinetics.distribution.pmf import LatticeVector, WealthPMF, align
from exchange_kinetics.exceptions import NonPositiveMeanError, UndefinedDivergenceError


def mass(p: LatticeVector) -> float:
    return float(np.sum(p.values))


def mean(p: LatticeVector) -> float:
    return float(np.dot(p.support, p.values))


def debt(p: LatticeVector) -> float:
    """Average debt per agent, -sum_{n<=-1} n p_n."""
    if p.n_min >= 0:
        return 0.0
    k = min(p.index_of(0), len(p))
    return float(-np.dot(p.support[:k], p.values[:k]))


def rich_proportion(p: LatticeVector) -> float:
    """r = sum_{n>=1} p_n."""
    k = max(p.index_of(1), 0)
    return float(np.sum(p.values[k:]))


def debt_proportion(p: LatticeVector) -> float:
    """d = sum_{n<=-1} p_n."""
    k = min(max(p.index_of(0), 0), len(p))
    return float(np.sum(p.values[:k]))


def tie_probability(p: WealthPMF) -> float:
    """Probability that two independent draws from p are equal."""
    return float(np.dot(p.probs, p.probs))


def kl_divergence(p: WealthPMF, q: WealthPMF) -> float:
    """
    Relative entropy sum p_n log(p_n / q_n), with 0 log 0 = 0.
    Raises UndefinedDivergenceError when p puts mass where q has none.
    """
    _, (pv, qv) = align(p, q)
    terms = rel_entr(pv, qv)
    if np.isinf(terms).any():
        n_bad = int(np.argmax(np.isinf(terms))) + min(p.n_min, q.n_min)
        raise UndefinedDivergenceError(f"p has mass at n = {n_bad} where q vanishes")
    return float(terms.sum())


def gini(p: WealthPMF) -> float:
    """
    Gini index (1 / 2mu) sum_ij |i - j| p_i p_j in O(W).
    For integer support E|S - S'| = 2 sum_k F(k) (1 - F(k)), with F the CDF;
    the survival part is accumulated from the right to keep tail precision.
    The value may exceed 1 when p has mass on negative wealth.
    """
    mu = mean(p)
    if not mu > 0:
        raise NonPositiveMeanError(f"Gini index needs a positive mean, got {mu!r}")
    probs = p.probs
    below = np.cumsum(probs)[:-1]
    above = np.cumsum(probs[::-1])[::-1][1:]
    return float(np.dot(below, above) / mu)


def lp_distance(p: LatticeVector, q: LatticeVector, exponent: float = 1.0) -> float:
    if exponent < 1:
        raise ValueError("exponent must be at least 1")
    _, (pv, qv) = align(p, q)
    diff = np.abs(pv - qv)
    if np.isinf(exponent):
        return float(diff.max())
    return float(np.sum(diff**exponent) ** (1.0 / exponent))


def total_variation(p: WealthPMF, q: WealthPMF) -> float:
    return 0.5 * lp_distance(p, q, 1.0)
