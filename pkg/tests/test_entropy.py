import logging

import numpy as np
import pytest
from hypothesis import given

from exchange_kinetics.analysis.entropy import DecayFit, entropy_dissipation_rate, fit_sqrt_exponential_decay
from exchange_kinetics.analysis.equilibrium import equilibrium_pmf
from exchange_kinetics.distribution.functionals import kl_divergence
from exchange_kinetics.distribution.pmf import WealthPMF
from exchange_kinetics.exceptions import DegenerateDistributionError
from exchange_kinetics.mean_field.integrator import IntegratorConfig, MeanFieldState, Phase, step
from tests.strategies import banked_pmfs


def perturbed_equilibrium(mu, nu, eps):
    """p* plus eps (d_5 - 2 d_6 + d_7), which keeps mass, mean and debt."""
    spec, p_star = equilibrium_pmf(mu, nu)
    values = p_star.values.copy()
    k = p_star.index_of(5)
    values[k : k + 3] += eps * np.array([1.0, -2.0, 1.0])
    return spec, p_star, WealthPMF(p_star.offset, values)


def test_rate_vanishes_at_equilibrium():
    spec, p_star = equilibrium_pmf(10, 0.4)
    assert abs(entropy_dissipation_rate(p_star, spec)) < 1e-12


def test_rate_is_negative_off_equilibrium(caplog):
    spec, _, p = perturbed_equilibrium(10, 0.4, 1e-3)
    with caplog.at_level(logging.WARNING):
        rate = entropy_dissipation_rate(p, spec)
    assert rate < 0
    assert not caplog.records


def test_warns_off_affine_space(caplog):
    spec, _ = equilibrium_pmf(10, 0.4)
    with caplog.at_level(logging.WARNING):
        entropy_dissipation_rate(WealthPMF.from_mapping({-1: 0.2, 0: 0.3, 1: 0.5}), spec)
    assert "affine space" in caplog.text


@given(banked_pmfs())
def test_rate_is_never_positive(p):
    with np.errstate(over="raise", divide="raise", invalid="raise"):
        assert entropy_dissipation_rate(p) <= 0


def test_rate_with_far_apart_neighbours():
    # 0.5 / 1e-310 overflows a double; the log difference does not
    p = WealthPMF(-1, np.array([0.25, 0.5 - 1e-310, 1e-310, 0.25]))
    with np.errstate(over="raise", divide="raise", invalid="raise"):
        rate = entropy_dissipation_rate(p)
    assert np.isfinite(rate)
    assert rate < 0



def test_degenerate():
    with pytest.raises(DegenerateDistributionError):
        entropy_dissipation_rate(WealthPMF.delta(-2))


def test_rate_matches_entropy_change_along_flow():
    spec, p_star, p = perturbed_equilibrium(10, 0.4, 5e-3)
    dt = 1e-3
    start = MeanFieldState(p, 0.0, Phase.PHASE_II, t_star=0.0)
    end = step(start, IntegratorConfig(dt=dt))
    measured = (kl_divergence(end.pmf, p_star) - kl_divergence(p, p_star)) / dt
    predicted = 0.5 * (entropy_dissipation_rate(p, spec) + entropy_dissipation_rate(end.pmf, spec))
    assert measured == pytest.approx(predicted, rel=0.02)


def test_rate_scales_with_lambda():
    spec, _, p = perturbed_equilibrium(10, 0.4, 1e-3)
    assert entropy_dissipation_rate(p, spec, lam=3.0) == pytest.approx(3 * entropy_dissipation_rate(p, spec))


def test_decay_fit_recovers_parameters():
    t = np.linspace(100, 5000, 50)
    fit = fit_sqrt_exponential_decay(t, 0.674 * np.exp(-0.182 * np.sqrt(t)))
    assert fit.c1 == pytest.approx(0.674, rel=1e-10)
    assert fit.c2 == pytest.approx(0.182, rel=1e-10)
    assert fit.rms < 1e-10
    assert fit(t[0]) == pytest.approx(0.674 * np.exp(-0.182 * 10))


def test_decay_fit_of_constant():
    fit = fit_sqrt_exponential_decay(np.arange(1, 11), np.full(10, 0.5))
    assert fit.c2 == pytest.approx(0.0, abs=1e-12)
    assert fit.c1 == pytest.approx(0.5)


def test_decay_fit_with_noise():
    rng = np.random.default_rng(0)
    t = np.linspace(100, 5000, 200)
    values = 0.674 * np.exp(-0.182 * np.sqrt(t)) * np.exp(0.01 * rng.standard_normal(t.size))
    fit = fit_sqrt_exponential_decay(t, values)
    assert fit.c2 == pytest.approx(0.182, rel=0.05)
    assert fit.c1 == pytest.approx(0.674, rel=0.05)
    assert isinstance(fit, DecayFit)
    assert set(fit.as_dict()) == {"c1", "c2", "rms"}


def test_decay_fit_rejects_bad_input():
    with pytest.raises(ValueError):
        fit_sqrt_exponential_decay(np.arange(5), np.ones(5))
    with pytest.raises(ValueError):
        fit_sqrt_exponential_decay(np.arange(10), np.r_[np.ones(9), 0.0])
    with pytest.raises(ValueError):
        fit_sqrt_exponential_decay(np.arange(10), np.ones(9))
