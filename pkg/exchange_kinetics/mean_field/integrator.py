import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np
import pandas as pd
from scipy.special import rel_entr

from exchange_kinetics.analysis.equilibrium import EquilibriumSpec, equilibrium_spec
from exchange_kinetics.distribution.functionals import debt, gini, mass, mean
from exchange_kinetics.distribution.params import ModelParams
from exchange_kinetics.distribution.pmf import DEFAULT_TAIL_THRESHOLD, WealthPMF
from exchange_kinetics.exceptions import HorizonExceededError, WindowOverflowError
from exchange_kinetics.logger import InMemoryLogger, Logger
from exchange_kinetics.mean_field.operators import q1_rates, q2_rates, q_vanilla_rates
from exchange_kinetics.mean_field.step_info import MeanFieldStepInfo

logger = logging.getLogger(__name__)

SCHEMES = ("RK4", "Euler")
MIN_EXTENSION = 8
EXTENSION_FACTOR = 0.25
ROUND_OFF = 1e-12
BISECTION_STEPS = 60
DEFAULT_MAX_WINDOW = 1 << 20


class Phase(str, Enum):
    PHASE_I = "PhaseI"
    PHASE_II = "PhaseII"
    VANILLA = "Vanilla"


@dataclass(frozen=True)
class IntegratorConfig:
    """
    dt: float
        Time step; see `default_dt`.
    scheme: str
        "RK4" or "Euler".
    tail_threshold: float
        The window is extended whenever a boundary slot exceeds this mass.
    t_end: float
        Final time.
    record_stride: float
        Time between trajectory rows.
    snapshot_times: tuple of float
        Times at which the PMF is stored.
    max_window: int
        Hard cap on the number of slots.
    """

    dt: float = 0.01
    scheme: str = "RK4"
    tail_threshold: float = DEFAULT_TAIL_THRESHOLD
    t_end: float = 0.0
    record_stride: float = 1.0
    snapshot_times: tuple[float, ...] = ()
    max_window: int = DEFAULT_MAX_WINDOW

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not 0 < self.tail_threshold <= 1e-8:
            raise ValueError("tail_threshold must lie in (0, 1e-8]")
        if not self.t_end >= 0:
            raise ValueError("t_end must be non-negative")
        if not self.record_stride > 0:
            raise ValueError("record_stride must be positive")
        if self.max_window < 3:
            raise ValueError("max_window must be at least 3")
        snapshots = tuple(float(s) for s in self.snapshot_times)
        if list(snapshots) != sorted(snapshots) or any(s < 0 for s in snapshots):
            raise ValueError("snapshot_times must be non-negative and sorted ascending")
        object.__setattr__(self, "snapshot_times", snapshots)

    @staticmethod
    def default_dt(lam: float = 1.0) -> float:
        return 0.01 * min(1.0, 1.0 / lam)

    def record_times(self) -> list[float]:
        n = int(math.floor(self.t_end / self.record_stride + 1e-9))
        times = [k * self.record_stride for k in range(n + 1)]
        if not math.isclose(times[-1], self.t_end, rel_tol=1e-9, abs_tol=1e-12):
            times.append(self.t_end)
        return times


@dataclass(frozen=True)
class MeanFieldState:
    pmf: WealthPMF
    time: float
    phase: Phase
    t_star: float | None = None
    accumulated_debt: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "accumulated_debt", debt(self.pmf))


@dataclass
class MeanFieldRun:
    trajectory: pd.DataFrame
    state: MeanFieldState
    config: IntegratorConfig
    snapshots: dict[float, WealthPMF] = field(default_factory=dict)
    window_history: list[dict] = field(default_factory=list)
    wall_clock: float = 0.0

    @property
    def t_star(self) -> float | None:
        return self.state.t_star

    def report(self) -> dict:
        return {
            "t_star": self.t_star,
            "phase": self.state.phase.value,
            "scheme": self.config.scheme,
            "dt": self.config.dt,
            "t_end": self.config.t_end,
            "window_history": self.window_history,
        }


def _rates(values: np.ndarray, offset: int, phase: Phase, lam: float) -> np.ndarray:
    if phase is Phase.PHASE_I:
        out = q1_rates(values)
    elif phase is Phase.PHASE_II:
        out = q2_rates(values, -offset)
    else:
        out = q_vanilla_rates(values)
    out *= lam
    return out


def _advance(values: np.ndarray, offset: int, phase: Phase, lam: float, h: float, scheme: str) -> np.ndarray:
    k1 = _rates(values, offset, phase, lam)
    if scheme == "Euler":
        return values + h * k1
    k2 = _rates(values + 0.5 * h * k1, offset, phase, lam)
    k3 = _rates(values + 0.5 * h * k2, offset, phase, lam)
    k4 = _rates(values + h * k3, offset, phase, lam)
    return values + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _clean(values: np.ndarray, t: float) -> np.ndarray:
    """Clamp negative round-off and renormalize."""
    lowest = values.min()
    if lowest < 0:
        if lowest < -ROUND_OFF:
            logger.warning("clamped negative mass %.3e at t = %.6g; consider a smaller dt", lowest, t)
        else:
            logger.debug("clamped negative round-off %.3e at t = %.6g", lowest, t)
        values = np.maximum(values, 0.0)
    return values / values.sum()


def _array_debt(values: np.ndarray, offset: int) -> float:
    k = min(max(-offset, 0), len(values))
    return float(-np.dot(np.arange(offset, offset + k), values[:k]))


def _fit_window(
    values: np.ndarray, offset: int, phase: Phase, tail_threshold: float, max_window: int
) -> tuple[np.ndarray, int]:
    """Extend the window when a boundary slot carries more than `tail_threshold`."""
    if phase is Phase.VANILLA and offset != 0:
        if offset < 0:
            if np.any(values[: min(-offset, len(values))] > 0):
                raise ValueError("the model without bank has no negative wealth")
            values = values[-offset:] if -offset < len(values) else np.zeros(1)
        else:
            values = np.concatenate([np.zeros(offset), values])
        offset = 0
    extension = max(MIN_EXTENSION, math.ceil(EXTENSION_FACTOR * len(values)))
    left = extension if phase is not Phase.VANILLA and values[0] > tail_threshold else 0
    right = extension if values[-1] > tail_threshold else 0
    if phase is Phase.PHASE_II:
        left = max(left, offset + 1)
        right = max(right, 1 - (offset + len(values) - 1))
    if left == 0 and right == 0:
        return values, offset
    width = len(values) + left + right
    if width > max_window:
        raise WindowOverflowError(f"window of {width} slots exceeds the cap of {max_window}")
    logger.debug("extending window by (%d, %d) to %d slots", left, right, width)
    return np.concatenate([np.zeros(left), values, np.zeros(right)]), offset - left


def step(state: MeanFieldState, cfg: IntegratorConfig, lam: float = 1.0) -> MeanFieldState:
    """One explicit step of dp/dt = lam Q[p] with the operator of the current phase."""
    values, offset = _fit_window(
        state.pmf.values, state.pmf.offset, state.phase, cfg.tail_threshold, cfg.max_window
    )
    t = state.time + cfg.dt
    values = _clean(_advance(values, offset, state.phase, lam, cfg.dt, cfg.scheme), t)
    return MeanFieldState(WealthPMF(offset, values, cfg.tail_threshold), t, state.phase, state.t_star)


def detect_t_star(
    times: Sequence[float],
    debts: Sequence[float],
    threshold: float,
    debt_at: Callable[[float], float] | None = None,
) -> float:
    """
    First time the debt series reaches `threshold`.
    The bracketing interval is narrowed by bisection when `debt_at` can evaluate the
    debt at intermediate times, then the crossing is interpolated linearly.
    """
    times = np.asarray(times, dtype=np.float64)
    debts = np.asarray(debts, dtype=np.float64)
    if len(times) == 0 or len(times) != len(debts):
        raise ValueError("times and debts must be non-empty and of equal length")
    reached = np.flatnonzero(debts >= threshold)
    if len(reached) == 0:
        raise HorizonExceededError(
            f"debt {debts[-1]:.6g} is below the limit {threshold:.6g} at the horizon t = {times[-1]:.6g}"
        )
    k = reached[0]
    if k == 0:
        return float(times[0])
    lo, hi = times[k - 1], times[k]
    d_lo, d_hi = debts[k - 1], debts[k]
    if debt_at is not None:
        for _ in range(BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            d_mid = debt_at(mid)
            if d_mid >= threshold:
                hi, d_hi = mid, d_mid
            else:
                lo, d_lo = mid, d_mid
    if d_hi == d_lo:
        return float(hi)
    return float(lo + (threshold - d_lo) * (hi - lo) / (d_hi - d_lo))


class MeanFieldIntegrator:
    """
    Two-phase integration of the mean-field equations: the free random walk Q1 until
    the average debt reaches mu*nu, the bank-constrained operator Q2 afterwards.
    nu = 0 runs the model without bank throughout.
    """

    def __init__(
        self,
        params: ModelParams,
        config: IntegratorConfig,
        loggers: Iterable[Logger] | None = None,
    ) -> None:
        self.params = params
        self.config = config
        self.dt = config.dt
        self.loggers = list(loggers) if loggers is not None else []
        self.equilibrium: EquilibriumSpec = equilibrium_spec(params.mu, params.nu)

    @property
    def dt(self) -> float:
        return self._dt

    @dt.setter
    def dt(self, dt: float) -> None:
        if not dt > 0:
            raise ValueError("dt must be positive")
        self._dt = float(dt)

    @property
    def lam(self) -> float:
        return self.params.lam

    def initial_state(self, p0: WealthPMF) -> MeanFieldState:
        limit = self.params.debt_limit
        if self.params.nu == 0:
            return MeanFieldState(p0, 0.0, Phase.VANILLA, t_star=0.0)
        if debt(p0) >= limit - ROUND_OFF:
            return MeanFieldState(p0, 0.0, Phase.PHASE_II, t_star=0.0)
        return MeanFieldState(p0, 0.0, Phase.PHASE_I)

    def initial_window(self, p0: WealthPMF, phase: Phase) -> tuple[np.ndarray, int]:
        spread = 6.0 * math.sqrt(self.config.t_end * self.lam)
        lo = min(p0.n_min, math.floor(self.params.mu - spread))
        hi = max(p0.n_max, math.ceil(self.params.mu + spread))
        if phase is Phase.VANILLA:
            lo = max(lo, 0)
        if hi - lo + 1 > self.config.max_window:
            raise WindowOverflowError(f"initial window [{lo}, {hi}] exceeds the cap of {self.config.max_window} slots")
        pmf = p0.covering(lo, hi)
        return _fit_window(
            np.array(pmf.values), pmf.offset, phase, self.config.tail_threshold, self.config.max_window
        )

    def dkl_to_equilibrium(self, pmf: WealthPMF) -> float:
        terms = rel_entr(pmf.values, self.equilibrium.probabilities(pmf.support))
        if np.isinf(terms).any():
            return math.nan
        return float(terms.sum())

    def record(self, state: MeanFieldState, iteration: int) -> MeanFieldStepInfo:
        pmf = state.pmf
        info = MeanFieldStepInfo(
            iteration=iteration,
            t=state.time,
            phase=state.phase.value,
            mass=mass(pmf),
            mean=mean(pmf),
            debt=state.accumulated_debt,
            dkl_to_eq=self.dkl_to_equilibrium(pmf),
            gini=gini(pmf),
        )
        for lg in self.loggers:
            lg.log(info)
        return info

    def _schedule(self) -> list[tuple[float, bool, list[float]]]:
        marks = [(t, True, None) for t in self.config.record_times()]
        marks += [(s, False, s) for s in self.config.snapshot_times if s <= self.config.t_end]
        marks.sort(key=lambda m: m[0])
        schedule: list[tuple[float, bool, list[float]]] = []
        for t, is_record, snapshot in marks:
            if schedule and t - schedule[-1][0] <= 1e-9 * max(1.0, t):
                prev_t, prev_record, snaps = schedule[-1]
                schedule[-1] = (prev_t, prev_record or is_record, snaps)
            else:
                schedule.append((t, is_record, []))
            if snapshot is not None:
                schedule[-1][2].append(snapshot)
        return schedule

    def run(self, p0: WealthPMF) -> MeanFieldRun:
        cfg = self.config
        started = time.perf_counter()
        state = self.initial_state(p0)
        phase, t_star = state.phase, state.t_star
        values, offset = self.initial_window(p0, phase)
        t = 0.0
        threshold = self.params.debt_limit
        window_history = [{"t": t, "n_min": offset, "n_max": offset + len(values) - 1}]

        memory = InMemoryLogger()
        self.loggers.append(memory)
        snapshots: dict[float, WealthPMF] = {}
        try:
            for lg in self.loggers:
                lg.initialize(MeanFieldStepInfo.columns)
            iteration = 0
            for stop, is_record, snapshot_keys in self._schedule():
                while stop - t > 1e-12 * max(1.0, stop):
                    fitted, new_offset = _fit_window(values, offset, phase, cfg.tail_threshold, cfg.max_window)
                    if new_offset != offset or len(fitted) != len(values):
                        window_history.append({"t": t, "n_min": new_offset, "n_max": new_offset + len(fitted) - 1})
                    values, offset = fitted, new_offset
                    h = min(self.dt, stop - t)
                    advanced = _clean(_advance(values, offset, phase, self.lam, h, cfg.scheme), t + h)
                    if phase is Phase.PHASE_I and _array_debt(advanced, offset) >= threshold:
                        t_star = self._locate_t_star(values, offset, t, h, advanced, threshold)
                        values = _clean(_advance(values, offset, phase, self.lam, t_star - t, cfg.scheme), t_star)
                        t = t_star
                        phase = Phase.PHASE_II
                        logger.info("debt limit %.6g reached at t* = %.6g; switching to Phase II", threshold, t_star)
                        continue
                    values = advanced
                    t = stop if h == stop - t else t + h
                state = MeanFieldState(WealthPMF(offset, values, cfg.tail_threshold), t, phase, t_star)
                if is_record:
                    self.record(state, iteration)
                    iteration += 1
                for key in snapshot_keys:
                    snapshots[key] = state.pmf
        finally:
            self.loggers.remove(memory)

        elapsed = time.perf_counter() - started
        logger.debug("integrated to t = %.6g in %.2fs (t* = %s)", t, elapsed, t_star)
        return MeanFieldRun(
            trajectory=memory.to_frame(),
            state=state,
            config=cfg,
            snapshots=snapshots,
            window_history=window_history,
            wall_clock=elapsed,
        )

    def _locate_t_star(
        self, values: np.ndarray, offset: int, t: float, h: float, advanced: np.ndarray, threshold: float
    ) -> float:
        def debt_at(s: float) -> float:
            partial = _advance(values, offset, Phase.PHASE_I, self.lam, s - t, self.config.scheme)
            return _array_debt(partial, offset)

        return detect_t_star(
            [t, t + h],
            [_array_debt(values, offset), _array_debt(advanced, offset)],
            threshold,
            debt_at=debt_at,
        )


def integrate_two_phase(
    p0: WealthPMF,
    params: ModelParams,
    cfg: IntegratorConfig,
    loggers: Iterable[Logger] | None = None,
) -> MeanFieldRun:
    return MeanFieldIntegrator(params, cfg, loggers=loggers).run(p0)
