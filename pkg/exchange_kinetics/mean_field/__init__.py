from exchange_kinetics.mean_field.integrator import (
    IntegratorConfig,
    MeanFieldIntegrator,
    MeanFieldRun,
    MeanFieldState,
    Phase,
    detect_t_star,
    integrate_two_phase,
    step,
)
from exchange_kinetics.mean_field.operators import (
    bank_cash_stationary_law,
    debt_rate,
    q1_apply,
    q2_apply,
    q_tilde_apply,
    q_vanilla_apply,
)
from exchange_kinetics.mean_field.step_info import MeanFieldStepInfo

__all__ = [
    "IntegratorConfig",
    "MeanFieldIntegrator",
    "MeanFieldRun",
    "MeanFieldState",
    "MeanFieldStepInfo",
    "Phase",
    "bank_cash_stationary_law",
    "debt_rate",
    "detect_t_star",
    "integrate_two_phase",
    "q1_apply",
    "q2_apply",
    "q_tilde_apply",
    "q_vanilla_apply",
    "step",
]
