import math

import numpy as np
import pytest
from scipy.special import ive

from exchange_kinetics.analysis.equilibrium import equilibrium_pmf
from exchange_kinetics.distribution.functionals import debt, lp_distance, mass, mean
from exchange_kinetics.distribution.params import ModelParams
from exchange_kinetics.distribution.pmf import WealthPMF
from exchange_kinetics.exceptions import HorizonExceededError, WindowOverflowError
from exchange_kinetics.mean_field.integrator import (
    IntegratorConfig,
    MeanFieldIntegrator,
    MeanFieldState,
    Phase,
    detect_t_star,
    integrate_two_phase,
    step,
)
from exchange_kinetics.mean_field.step_info import MeanFieldStepInfo

BANKED = ModelParams(n_agents=1, mu=10, nu=0.4)


def test_euler_step_from_point_mass():
    state = MeanFieldState(WealthPMF.delta(10), 0.0, Phase.PHASE_I)
    new = step(state, IntegratorConfig(dt=0.01, scheme="Euler"))
    assert new.time == 0.01
    assert new.phase is Phase.PHASE_I
    assert new.pmf.at(10) == pytest.approx(0.98, abs=1e-15)
    assert new.pmf.at(9) == pytest.approx(0.01, abs=1e-15)
    assert new.pmf.at(11) == pytest.approx(0.01, abs=1e-15)
    # the window grew to hold the outgoing flow
    assert new.pmf.n_min < 9 and new.pmf.n_max > 11


def test_step_conserves_mass_mean_and_debt():
    _, p_star = equilibrium_pmf(3, 0.5)
    bumped = p_star.values.copy()
    k = p_star.index_of(4)
    bumped[k - 1 : k + 2] += 1e-3 * np.array([1.0, -2.0, 1.0])
    p = WealthPMF(p_star.offset, bumped)
    state = MeanFieldState(p, 0.0, Phase.PHASE_II, t_star=0.0)
    for _ in range(20):
        state = step(state, IntegratorConfig(dt=0.01))
    assert mass(state.pmf) == pytest.approx(1.0, abs=1e-12)
    assert mean(state.pmf) == pytest.approx(3.0, abs=1e-10)
    assert debt(state.pmf) == pytest.approx(1.5, abs=1e-10)
    assert state.accumulated_debt == debt(state.pmf)
    assert state.time == pytest.approx(0.2)


def test_window_overflow():
    state = MeanFieldState(WealthPMF.delta(10), 0.0, Phase.PHASE_I)
    with pytest.raises(WindowOverflowError):
        step(state, IntegratorConfig(dt=0.01, max_window=5))


def test_phase_one_matches_skellam_law():
    cfg = IntegratorConfig(dt=1e-3, t_end=5.0, record_stride=0.5, snapshot_times=(0.5, 1.0, 5.0))
    result = integrate_two_phase(WealthPMF.delta(10), BANKED, cfg)
    assert result.state.phase is Phase.PHASE_I
    assert result.t_star is None
    for t in (0.5, 1.0, 5.0):
        pmf = result.snapshots[t]
        oracle = ive(np.abs(pmf.support - 10), 2 * t)
        assert np.abs(pmf.values - oracle).max() < 1e-8
    assert result.trajectory["t"].to_numpy() == pytest.approx(np.arange(0, 5.01, 0.5))
    assert list(result.trajectory.columns) == list(MeanFieldStepInfo.columns)
    assert set(result.trajectory["phase"]) == {"PhaseI"}
    assert 0 < result.trajectory["debt"].iloc[-1] < 1e-2


def test_detect_t_star_on_synthetic_series():
    times = np.linspace(0, 4, 9)
    assert detect_t_star(times, times / 2, 1.0) == pytest.approx(2.0)
    assert detect_t_star([0.0, 1.0], [0.1, 0.3], 0.2) == pytest.approx(0.5)
    assert detect_t_star([0.0, 1.0], [0.1, 0.3], 0.2, debt_at=lambda t: 0.1 + 0.2 * t**2) == pytest.approx(
        math.sqrt(0.5), abs=1e-12
    )
    assert detect_t_star([0.0, 1.0], [0.0, 0.5], 0.0) == 0.0
    with pytest.raises(HorizonExceededError):
        detect_t_star(times, times / 2, 5.0)
    with pytest.raises(ValueError):
        detect_t_star([], [], 1.0)


def test_initial_phase_selection():
    cfg = IntegratorConfig(dt=0.01)
    vanilla = MeanFieldIntegrator(ModelParams(1, 2.0, 0.0), cfg).initial_state(WealthPMF.delta(2))
    assert (vanilla.phase, vanilla.t_star) == (Phase.VANILLA, 0.0)
    spec, p_star = equilibrium_pmf(10, 0.4)
    banked = MeanFieldIntegrator(BANKED, cfg).initial_state(p_star)
    assert (banked.phase, banked.t_star) == (Phase.PHASE_II, 0.0)
    fresh = MeanFieldIntegrator(BANKED, cfg).initial_state(WealthPMF.delta(10))
    assert (fresh.phase, fresh.t_star) == (Phase.PHASE_I, None)


def test_equilibrium_start_stays_put():
    _, p_star = equilibrium_pmf(10, 0.4)
    result = integrate_two_phase(p_star, BANKED, IntegratorConfig(dt=0.05, t_end=5.0))
    assert result.t_star == 0.0
    assert lp_distance(result.state.pmf, p_star, 1) < 1e-10
    assert np.all(result.trajectory["dkl_to_eq"] < 1e-12)


def test_vanilla_relaxes_to_geometric_law():
    mu = 2
    result = integrate_two_phase(WealthPMF.delta(mu), ModelParams(1, mu, 0.0), IntegratorConfig(dt=0.02, t_end=400.0, record_stride=10.0))
    assert result.state.phase is Phase.VANILLA
    assert result.state.pmf.n_min == 0
    _, geometric = equilibrium_pmf(mu, 0.0)
    assert geometric.at(0) == pytest.approx(1 / (1 + mu))
    assert lp_distance(result.state.pmf, geometric, 1) < 1e-3
    assert mean(result.state.pmf) == pytest.approx(mu, abs=1e-8)
    dkl = result.trajectory["dkl_to_eq"].to_numpy()
    assert np.all(np.diff(dkl) <= 1e-12)


def test_t_star_and_phase_two():
    cfg = IntegratorConfig(dt=0.05, t_end=260.0, record_stride=1.0)
    result = integrate_two_phase(WealthPMF.delta(10), BANKED, cfg)
    assert result.state.phase is Phase.PHASE_II
    assert 180 <= result.t_star <= 220
    traj = result.trajectory
    after = traj[traj["t"] > result.t_star]
    before = traj[traj["t"] < result.t_star]
    assert set(after["phase"]) == {"PhaseII"}
    assert set(before["phase"]) == {"PhaseI"}
    np.testing.assert_allclose(after["debt"], 4.0, atol=1e-8)
    assert np.all(np.diff(before["debt"]) >= 0)
    assert np.all(np.diff(after["dkl_to_eq"]) <= 1e-12)
    assert np.all(np.abs(traj["mass"] - 1) < 1e-12)
    np.testing.assert_allclose(traj["mean"], 10.0, atol=1e-8)
    assert result.report()["t_star"] == result.t_star
    assert result.window_history[0]["t"] == 0.0


def test_integrator_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(dt=0)
    with pytest.raises(ValueError):
        IntegratorConfig(scheme="Heun")
    with pytest.raises(ValueError):
        IntegratorConfig(tail_threshold=1e-3)
    with pytest.raises(ValueError):
        IntegratorConfig(snapshot_times=(2.0, 1.0))
    assert IntegratorConfig(t_end=1.0, record_stride=0.3).record_times() == pytest.approx([0, 0.3, 0.6, 0.9, 1.0])
    assert IntegratorConfig(t_end=1.0, record_stride=0.25).record_times() == [0, 0.25, 0.5, 0.75, 1.0]
    assert IntegratorConfig.default_dt(4.0) == 0.0025


def test_phase_two_window_covers_zero():
    p = WealthPMF(0, [1e-15, 0.5, 0.5 - 1e-15, 0.0])
    state = MeanFieldState(p, 0.0, Phase.PHASE_II, t_star=0.0)
    new = step(state, IntegratorConfig(dt=0.01))
    assert (new.pmf.n_min, new.pmf.n_max) == (-1, 3)
    assert mass(new.pmf) == pytest.approx(1.0)


@pytest.mark.slow
def test_long_run_converges_to_equilibrium():
    from exchange_kinetics.analysis.entropy import fit_sqrt_exponential_decay

    cfg = IntegratorConfig(dt=0.01, t_end=5000.0, record_stride=10.0)
    result = integrate_two_phase(WealthPMF.delta(10), BANKED, cfg)
    _, p_star = equilibrium_pmf(10, 0.4)
    assert lp_distance(result.state.pmf, p_star, 1) < 1e-3
    traj = result.trajectory
    phase_two = traj[traj["t"] > result.t_star]
    assert np.all(np.diff(phase_two["dkl_to_eq"]) <= 0)

    # the square-root law holds once the transient right after the switch has passed
    late = phase_two[phase_two["t"] >= 2 * result.t_star]
    fit = fit_sqrt_exponential_decay(late["t"], late["dkl_to_eq"])
    assert fit.c2 > 0
    assert fit.rms < 0.05
