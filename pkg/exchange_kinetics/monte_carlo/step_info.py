from dataclasses import dataclass
from typing import ClassVar


@dataclass
class ExchangeStepInfo:
    columns: ClassVar[tuple[str, ...]] = (
        "event",
        "time",
        "bank_cash",
        "bank_debt",
        "total_agent_debt",
        "gini",
    )

    iteration: int
    event: int
    time: float
    bank_cash: int
    bank_debt: int
    total_agent_debt: int
    gini: float

    def as_row(self) -> list:
        return [
            self.event,
            self.time,
            self.bank_cash,
            self.bank_debt,
            self.total_agent_debt,
            self.gini,
        ]
