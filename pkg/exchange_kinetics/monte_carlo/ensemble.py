from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from exchange_kinetics.distribution.params import ModelParams
from exchange_kinetics.distribution.pmf import WealthPMF
from exchange_kinetics.monte_carlo.kernel import total_debt


@dataclass
class AgentEnsemble:
    """
    Mutable state of the N-agent system.
    wealth: np.ndarray
        Integer wealth S_i of every agent; negative values are debt.
    bank_cash: int
        Lendable dollars left in the bank, B_c.
    bank_reserve: int
        Initial bank cash B_* = B_c + B_d.
    """

    wealth: np.ndarray
    bank_cash: int
    bank_reserve: int
    elapsed_time: float = 0.0
    event_count: int = 0
    depletion_event: int = field(default=-1)

    def __post_init__(self) -> None:
        self.wealth = np.array(self.wealth, dtype=np.int64)
        self.bank_cash = int(self.bank_cash)
        self.bank_reserve = int(self.bank_reserve)
        if self.bank_cash < 0 or self.bank_cash > self.bank_reserve:
            raise ValueError("bank_cash must lie in [0, bank_reserve]")
        if self.depletion_event < 0 and self.bank_cash == 0:
            self.depletion_event = self.event_count

    @property
    def n_agents(self) -> int:
        return len(self.wealth)

    @property
    def bank_debt(self) -> int:
        """B_d = B_* - B_c."""
        return self.bank_reserve - self.bank_cash

    @property
    def total_money(self) -> int:
        return int(self.wealth.sum())

    @property
    def total_agent_debt(self) -> int:
        """sum_i max(-S_i, 0)."""
        return int(total_debt(self.wealth))

    def check_invariants(self) -> None:
        if self.bank_cash < 0 or self.bank_debt < 0:
            raise AssertionError(f"bank out of range: B_c={self.bank_cash}, B_d={self.bank_debt}")
        if self.bank_cash != self.bank_reserve - self.total_agent_debt:
            raise AssertionError(
                f"B_c={self.bank_cash} but B_* - sum S^- = {self.bank_reserve - self.total_agent_debt}"
            )

    def copy(self) -> "AgentEnsemble":
        return AgentEnsemble(
            wealth=self.wealth.copy(),
            bank_cash=self.bank_cash,
            bank_reserve=self.bank_reserve,
            elapsed_time=self.elapsed_time,
            event_count=self.event_count,
            depletion_event=self.depletion_event,
        )


def init_ensemble(params: ModelParams, wealth: Sequence[int] | np.ndarray | None = None) -> AgentEnsemble:
    """
    Initial state with a full bank, B_c = B_*.
    params: ModelParams
        N*mu and N*mu*nu must be integers.
    wealth: sequence of int or None
        Explicit non-negative initial wealth summing to N*mu. None puts every agent at mu,
        which needs an integer mu.
    """
    params.check_integrality()
    if wealth is None:
        if params.mu != int(params.mu):
            raise ValueError("uniform-at-mu initial condition needs an integer mu; pass an explicit wealth vector")
        wealth = np.full(params.n_agents, int(params.mu), dtype=np.int64)
    else:
        wealth = np.asarray(wealth)
        if wealth.shape != (params.n_agents,):
            raise ValueError(f"wealth must have length {params.n_agents}")
        if not np.array_equal(wealth, np.round(wealth)):
            raise ValueError("wealth entries must be integers")
        wealth = wealth.astype(np.int64)
        if np.any(wealth < 0):
            raise ValueError("initial wealth must be non-negative; initial debt is not supported")
        if int(wealth.sum()) != params.total_money:
            raise ValueError(f"initial wealth sums to {int(wealth.sum())}, expected N*mu = {params.total_money}")
    reserve = params.bank_reserve
    return AgentEnsemble(wealth=wealth, bank_cash=reserve, bank_reserve=reserve)


def empirical_pmf(ensemble: AgentEnsemble) -> WealthPMF:
    """p_n = #{i : S_i = n} / N."""
    return WealthPMF.from_samples(ensemble.wealth)
