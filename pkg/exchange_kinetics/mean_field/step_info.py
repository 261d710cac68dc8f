from dataclasses import dataclass
from typing import ClassVar


@dataclass
class MeanFieldStepInfo:
    columns: ClassVar[tuple[str, ...]] = (
        "t",
        "phase",
        "mass",
        "mean",
        "debt",
        "dkl_to_eq",
        "gini",
    )

    iteration: int
    t: float
    phase: str
    mass: float
    mean: float
    debt: float
    dkl_to_eq: float
    gini: float

    def as_row(self) -> list:
        return [
            self.t,
            self.phase,
            self.mass,
            self.mean,
            self.debt,
            self.dkl_to_eq,
            self.gini,
        ]
