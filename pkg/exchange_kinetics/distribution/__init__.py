from exchange_kinetics.distribution.functionals import (
    debt,
    debt_proportion,
    gini,
    kl_divergence,
    lp_distance,
    mass,
    mean,
    rich_proportion,
    tie_probability,
    total_variation,
)
from exchange_kinetics.distribution.params import ModelParams
from exchange_kinetics.distribution.pmf import LatticeVector, RateVector, WealthPMF, align

__all__ = [
    "LatticeVector",
    "ModelParams",
    "RateVector",
    "WealthPMF",
    "align",
    "debt",
    "debt_proportion",
    "gini",
    "kl_divergence",
    "lp_distance",
    "mass",
    "mean",
    "rich_proportion",
    "tie_probability",
    "total_variation",
]
