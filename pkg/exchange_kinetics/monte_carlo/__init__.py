from exchange_kinetics.monte_carlo.ensemble import AgentEnsemble, empirical_pmf, init_ensemble
from exchange_kinetics.monte_carlo.monte_carlo import (
    GENERATOR_NAME,
    ExchangeMonteCarlo,
    RunConfig,
    RunResult,
    bank_cash_linearity,
    make_rng,
    run,
    step_event,
)
from exchange_kinetics.monte_carlo.replicas import EnsembleResult, run_ensemble

__all__ = [
    "GENERATOR_NAME",
    "AgentEnsemble",
    "EnsembleResult",
    "ExchangeMonteCarlo",
    "RunConfig",
    "RunResult",
    "bank_cash_linearity",
    "empirical_pmf",
    "init_ensemble",
    "make_rng",
    "run",
    "run_ensemble",
    "step_event",
]
