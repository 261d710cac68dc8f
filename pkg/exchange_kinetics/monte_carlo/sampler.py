from abc import ABC, abstractmethod

import numpy as np


class PairSampler(ABC):
    name: str

    @abstractmethod
    def draw(self, rng: np.random.Generator, n_agents: int, size: int) -> tuple[np.ndarray, np.ndarray]:
        """Return `size` (giver, receiver) index pairs."""
        raise NotImplementedError


class UniformPairSampler(PairSampler):
    """
    Ordered pairs (i, j), i != j, uniform over the N(N - 1) possibilities.
    The receiver is drawn among the N - 1 other agents and shifted past the giver.
    numpy's bounded integers are unbiased (Lemire rejection), so each pair has
    probability exactly 1 / (N(N - 1)).
    """

    name = "UniformPair"

    def draw(self, rng: np.random.Generator, n_agents: int, size: int) -> tuple[np.ndarray, np.ndarray]:
        if n_agents < 2:
            raise ValueError("at least two agents are needed to draw a pair")
        givers = rng.integers(0, n_agents, size=size, dtype=np.int64)
        receivers = rng.integers(0, n_agents - 1, size=size, dtype=np.int64)
        receivers += receivers >= givers
        return givers, receivers


class Clock(ABC):
    name: str

    @abstractmethod
    def advance(self, rng: np.random.Generator, n_events: int, total_rate: float) -> float:
        """Time elapsed over the next n_events events of a process with the given total rate."""
        raise NotImplementedError


class EventCountClock(Clock):
    """Deterministic clock: every event lasts 1 / total_rate."""

    name = "event-count"

    def advance(self, rng: np.random.Generator, n_events: int, total_rate: float) -> float:
        return n_events / total_rate


class ExponentialClock(Clock):
    """Poisson clock: inter-event times are Exponential(total_rate)."""

    name = "exponential-clock"

    def advance(self, rng: np.random.Generator, n_events: int, total_rate: float) -> float:
        if n_events == 0:
            return 0.0
        return float(rng.standard_exponential(n_events).sum() / total_rate)


CLOCKS: dict[str, type[Clock]] = {
    EventCountClock.name: EventCountClock,
    ExponentialClock.name: ExponentialClock,
}


def make_clock(time_mode: str) -> Clock:
    try:
        return CLOCKS[time_mode]()
    except KeyError:
        raise ValueError(f"time_mode must be one of {sorted(CLOCKS)}, got {time_mode!r}")
