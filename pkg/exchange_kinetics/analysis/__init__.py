from exchange_kinetics.analysis.equilibrium import (
    EquilibriumSpec,
    LaplaceParams,
    equilibrium_pmf,
    equilibrium_spec,
    laplace_params,
)
from exchange_kinetics.analysis.entropy import DecayFit, entropy_dissipation_rate, fit_sqrt_exponential_decay
from exchange_kinetics.analysis.linearization import LinearizationReport, linearization_report

# gini diagnostics drive the integrator; import them from exchange_kinetics.analysis.gini

__all__ = [
    "DecayFit",
    "EquilibriumSpec",
    "LaplaceParams",
    "LinearizationReport",
    "entropy_dissipation_rate",
    "equilibrium_pmf",
    "equilibrium_spec",
    "fit_sqrt_exponential_decay",
    "laplace_params",
    "linearization_report",
]
