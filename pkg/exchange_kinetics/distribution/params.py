from dataclasses import dataclass

from exchange_kinetics.util import as_integer_amount


@dataclass(frozen=True)
class ModelParams:
    """
    Parameters of the exchange model.
    n_agents: int
        Number of agents N.
    mu: float
        Average number of dollars per agent.
    nu: float
        Ratio of the bank's initial cash to the agents' combined wealth, B_* = N*mu*nu.
    lam: float
        Exchange rate lambda; each agent gives at rate lam.

    Integrality of N*mu and N*mu*nu is only required by the agent-based simulator,
    see `check_integrality`.
    """

    n_agents: int
    mu: float
    nu: float = 0.0
    lam: float = 1.0

    def __post_init__(self) -> None:
        if int(self.n_agents) != self.n_agents or self.n_agents < 1:
            raise ValueError("n_agents must be a positive integer")
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if not self.nu >= 0:
            raise ValueError("nu must be non-negative")
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        object.__setattr__(self, "n_agents", int(self.n_agents))
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "nu", float(self.nu))
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def debt_limit(self) -> float:
        """Average debt per agent the bank can sustain, mu*nu."""
        return self.mu * self.nu

    @property
    def total_money(self) -> int:
        return as_integer_amount(self.n_agents * self.mu, "N*mu")

    @property
    def bank_reserve(self) -> int:
        """B_* = N*mu*nu."""
        return as_integer_amount(self.n_agents * self.mu * self.nu, "N*mu*nu")

    def check_integrality(self) -> None:
        self.total_money
        self.bank_reserve
