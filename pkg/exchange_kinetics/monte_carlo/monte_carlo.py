import logging
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
import pandas as pd
from scipy.stats import linregress

from exchange_kinetics.distribution.functionals import gini
from exchange_kinetics.distribution.params import ModelParams
from exchange_kinetics.distribution.pmf import WealthPMF
from exchange_kinetics.logger import InMemoryLogger, Logger
from exchange_kinetics.monte_carlo.ensemble import AgentEnsemble, empirical_pmf, init_ensemble
from exchange_kinetics.monte_carlo.kernel import exchange, exchange_batch
from exchange_kinetics.monte_carlo.sampler import (
    CLOCKS,
    Clock,
    EventCountClock,
    PairSampler,
    UniformPairSampler,
    make_clock,
)
from exchange_kinetics.monte_carlo.step_info import ExchangeStepInfo

logger = logging.getLogger(__name__)

GENERATOR_NAME = "PCG64"
DEFAULT_RECORDS = 1000


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class RunConfig:
    """
    params: ModelParams
        Model parameters; N*mu and N*mu*nu must be integers.
    max_events: int
        Number of exchange events to simulate.
    seed: int
        Seed of the PCG64 generator, in [0, 2**64).
    snapshot_schedule: tuple of int
        Ascending event counts at which the empirical PMF is stored.
    time_mode: str
        "event-count" (dt = 1 / (lam N) per event) or "exponential-clock" (dt ~ Exp(lam N)).
    record_stride: int or None
        Events between trajectory rows; None gives about 1000 rows.
    initial_wealth: tuple of int or None
        Explicit initial wealth; None puts every agent at mu.
    """

    params: ModelParams
    max_events: int = 0
    seed: int = 0
    snapshot_schedule: tuple[int, ...] = ()
    time_mode: str = "event-count"
    record_stride: int | None = None
    initial_wealth: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if int(self.max_events) != self.max_events or self.max_events < 0:
            raise ValueError("max_events must be a non-negative integer")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        schedule = tuple(int(s) for s in self.snapshot_schedule)
        if list(schedule) != sorted(schedule):
            raise ValueError("snapshot_schedule must be sorted ascending")
        if any(s < 0 for s in schedule):
            raise ValueError("snapshot_schedule entries must be non-negative")
        if self.time_mode not in CLOCKS:
            raise ValueError(f"time_mode must be one of {sorted(CLOCKS)}")
        if self.record_stride is not None and self.record_stride < 1:
            raise ValueError("record_stride must be positive")
        object.__setattr__(self, "max_events", int(self.max_events))
        object.__setattr__(self, "snapshot_schedule", schedule)
        if self.initial_wealth is not None:
            object.__setattr__(self, "initial_wealth", tuple(int(s) for s in self.initial_wealth))

    @property
    def stride(self) -> int:
        if self.record_stride is not None:
            return self.record_stride
        return max(1, self.max_events // DEFAULT_RECORDS)

    def record_points(self) -> list[int]:
        points = list(range(0, self.max_events + 1, self.stride))
        if points[-1] != self.max_events:
            points.append(self.max_events)
        return points


@dataclass
class RunResult:
    ensemble: AgentEnsemble
    trajectory: pd.DataFrame
    snapshots: dict[int, WealthPMF] = field(default_factory=dict)
    seed: int = 0
    generator: str = GENERATOR_NAME
    wall_clock: float = 0.0

    def summary(self) -> dict:
        final = self.ensemble
        return {
            "seed": self.seed,
            "generator": self.generator,
            "wall_clock": self.wall_clock,
            "events": final.event_count,
            "time": final.elapsed_time,
            "bank_cash": final.bank_cash,
            "bank_debt": final.bank_debt,
            "total_agent_debt": final.total_agent_debt,
            "depletion_event": final.depletion_event,
            "gini": gini(empirical_pmf(final)),
        }


class BaseExchangeModel(ABC):
    def __init__(self, max_events: int, lam: float) -> None:
        self.max_events = max_events
        self.lam = lam

    @property
    def max_events(self) -> int:
        return self._max_events

    @max_events.setter
    def max_events(self, max_events: int) -> None:
        if max_events < 0:
            raise ValueError("max_events must be non-negative")
        self._max_events = int(max_events)

    @property
    def lam(self) -> float:
        return self._lam

    @lam.setter
    def lam(self, lam: float) -> None:
        if lam <= 0:
            raise ValueError("lam must be positive")
        self._lam = float(lam)

    @abstractmethod
    def step(self, *args, **kwargs):
        raise NotImplementedError

    @abstractmethod
    def run(self, *args, **kwargs):
        raise NotImplementedError


class ExchangeMonteCarlo(BaseExchangeModel):
    """
    Event-driven simulation of the unbiased exchange model with a bank.
    Every event picks an ordered pair (i, j), i != j; i gives one dollar to j if
    S_i >= 1, or if S_i <= 0 and the bank still has cash, otherwise nothing happens.
    """

    def __init__(
        self,
        config: RunConfig,
        loggers: Iterable[Logger] | None = None,
        pair_sampler: PairSampler | None = None,
        chunk_size: int = 1 << 16,
    ) -> None:
        super().__init__(config.max_events, config.params.lam)
        self.config = config
        self.loggers = list(loggers) if loggers is not None else []
        self.pair_sampler = pair_sampler or UniformPairSampler()
        self.clock = make_clock(config.time_mode)
        self.chunk_size = chunk_size

    @property
    def params(self) -> ModelParams:
        return self.config.params

    def total_rate(self, n_agents: int) -> float:
        return self.lam * n_agents

    def step(
        self,
        ensemble: AgentEnsemble,
        rng: np.random.Generator,
        pair: tuple[int, int] | None = None,
    ) -> AgentEnsemble:
        """Apply one event in place; `pair` forces the (giver, receiver) draw."""
        return step_event(ensemble, rng, self.lam, self.clock, self.pair_sampler, pair)

    def advance(self, ensemble: AgentEnsemble, rng: np.random.Generator, n_events: int) -> AgentEnsemble:
        """Apply n_events events in chunks through the compiled kernel."""
        rate = self.total_rate(ensemble.n_agents)
        remaining = n_events
        while remaining > 0:
            size = min(self.chunk_size, remaining)
            givers, receivers = self.pair_sampler.draw(rng, ensemble.n_agents, size)
            dt = self.clock.advance(rng, size, rate)
            bank_cash, depletion = exchange_batch(
                ensemble.wealth,
                ensemble.bank_cash,
                givers,
                receivers,
                ensemble.event_count,
                ensemble.depletion_event,
            )
            ensemble.bank_cash = int(bank_cash)
            ensemble.depletion_event = int(depletion)
            ensemble.event_count += size
            ensemble.elapsed_time += dt
            remaining -= size
        return ensemble

    def record(self, ensemble: AgentEnsemble, iteration: int) -> ExchangeStepInfo:
        info = ExchangeStepInfo(
            iteration=iteration,
            event=ensemble.event_count,
            time=float(ensemble.elapsed_time),
            bank_cash=ensemble.bank_cash,
            bank_debt=ensemble.bank_debt,
            total_agent_debt=ensemble.total_agent_debt,
            gini=gini(empirical_pmf(ensemble)),
        )
        for lg in self.loggers:
            lg.log(info)
        return info

    def run(self, ensemble: AgentEnsemble | None = None) -> RunResult:
        cfg = self.config
        started = time.perf_counter()
        if ensemble is None:
            ensemble = init_ensemble(cfg.params, cfg.initial_wealth)
        if cfg.max_events > 0 and ensemble.n_agents < 2:
            raise ValueError("at least two agents are needed to simulate exchanges")
        rng = make_rng(cfg.seed)

        memory = InMemoryLogger()
        self.loggers.append(memory)
        try:
            for lg in self.loggers:
                lg.initialize(ExchangeStepInfo.columns)

            records = set(cfg.record_points())
            snapshot_events = {s for s in cfg.snapshot_schedule if s <= cfg.max_events}
            snapshots: dict[int, WealthPMF] = {}
            iteration = 0
            for stop in sorted(records | snapshot_events):
                self.advance(ensemble, rng, stop - ensemble.event_count)
                if stop in records:
                    self.record(ensemble, iteration)
                    iteration += 1
                if stop in snapshot_events:
                    snapshots[stop] = empirical_pmf(ensemble)
        finally:
            self.loggers.remove(memory)

        elapsed = time.perf_counter() - started
        logger.debug(
            "ran %d events on %d agents in %.2fs (depletion at %d)",
            cfg.max_events,
            ensemble.n_agents,
            elapsed,
            ensemble.depletion_event,
        )
        return RunResult(
            ensemble=ensemble,
            trajectory=memory.to_frame(),
            snapshots=snapshots,
            seed=cfg.seed,
            wall_clock=elapsed,
        )


def step_event(
    ensemble: AgentEnsemble,
    rng: np.random.Generator,
    lam: float = 1.0,
    clock: Clock | None = None,
    pair_sampler: PairSampler | None = None,
    pair: tuple[int, int] | None = None,
) -> AgentEnsemble:
    """
    One exchange event applied to `ensemble` in place.
    pair: tuple of int or None
        Forced (giver, receiver) indices; drawn uniformly when None.
    """
    if pair is None:
        givers, receivers = (pair_sampler or UniformPairSampler()).draw(rng, ensemble.n_agents, 1)
        giver, receiver = int(givers[0]), int(receivers[0])
    else:
        giver, receiver = pair
        if giver == receiver:
            raise ValueError("giver and receiver must differ")
    ensemble.bank_cash = int(exchange(ensemble.wealth, ensemble.bank_cash, giver, receiver))
    ensemble.event_count += 1
    ensemble.elapsed_time += (clock or EventCountClock()).advance(rng, 1, lam * ensemble.n_agents)
    if ensemble.bank_cash == 0 and ensemble.depletion_event < 0:
        ensemble.depletion_event = ensemble.event_count
    return ensemble


def run(config: RunConfig, loggers: Iterable[Logger] | None = None) -> RunResult:
    return ExchangeMonteCarlo(config, loggers=loggers).run()


def bank_cash_linearity(trajectory: pd.DataFrame, depletion_event: int) -> float:
    """R^2 of a linear fit of bank cash against events, up to the first depletion."""
    rows = trajectory if depletion_event < 0 else trajectory[trajectory["event"] <= depletion_event]
    if len(rows) < 3:
        raise ValueError("need at least three trajectory rows before depletion")
    fit = linregress(rows["event"].to_numpy(float), rows["bank_cash"].to_numpy(float))
    return float(fit.rvalue**2)
