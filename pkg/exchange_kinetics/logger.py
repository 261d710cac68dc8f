from abc import ABC, abstractmethod
from pathlib import Path
from typing import ClassVar, Protocol, Sequence

import pandas as pd

FLOAT_FORMAT = "%.17g"


class StepInfo(Protocol):
    columns: ClassVar[tuple[str, ...]]
    iteration: int

    def as_row(self) -> list: ...


def format_value(value) -> str:
    if isinstance(value, float):
        return FLOAT_FORMAT % value
    return str(value)


class Logger(ABC):
    def __init__(self, log_interval: int = 1) -> None:
        """
        log_interval: int
            Only every log_interval-th record point is logged.
        """
        if log_interval < 1:
            raise ValueError("log_interval must be positive")
        self.log_interval = log_interval

    def initialize(self, columns: Sequence[str]) -> None:
        self.columns = tuple(columns)

    def should_log(self, info: StepInfo) -> bool:
        return info.iteration % self.log_interval == 0

    @abstractmethod
    def log(self, info: StepInfo) -> None:
        raise NotImplementedError


class PrintLogger(Logger):
    def __init__(self, log_interval: int = 1, width: int = 16) -> None:
        super().__init__(log_interval)
        self.width = width

    def initialize(self, columns: Sequence[str]) -> None:
        super().initialize(columns)
        print(", ".join(f"{c:>{self.width}}" for c in self.columns))

    def log(self, info: StepInfo) -> None:
        if not self.should_log(info):
            return
        cells = []
        for value in info.as_row():
            if isinstance(value, float):
                cells.append(f"{value:{self.width}.6g}")
            else:
                cells.append(f"{str(value):>{self.width}}")
        print(", ".join(cells))


class CSVFileLogger(Logger):
    """Streams record rows to a CSV file whose header is the step-info schema."""

    def __init__(self, out_file, log_interval: int = 1, force_overwrite: bool = False) -> None:
        super().__init__(log_interval)
        self.out_file = Path(out_file)
        self.force_overwrite = force_overwrite

    def initialize(self, columns: Sequence[str]) -> None:
        if self.out_file.exists() and not self.force_overwrite:
            raise RuntimeError(f"File {self.out_file} already exists.")
        super().initialize(columns)
        with open(self.out_file, "w", newline="") as f:
            f.write(",".join(self.columns) + "\n")

    def log(self, info: StepInfo) -> None:
        if not self.should_log(info):
            return
        with open(self.out_file, "a", newline="") as f:
            f.write(",".join(format_value(v) for v in info.as_row()) + "\n")


class InMemoryLogger(Logger):
    def __init__(self, log_interval: int = 1) -> None:
        super().__init__(log_interval)
        self.log_data: list[list] = []
        self.columns: tuple[str, ...] = ()

    def initialize(self, columns: Sequence[str]) -> None:
        super().initialize(columns)
        self.log_data = []

    def log(self, info: StepInfo) -> None:
        if not self.should_log(info):
            return
        self.log_data.append(info.as_row())

    def get_log(self, with_columns: bool = True):
        if with_columns:
            return self.log_data, self.columns
        return self.log_data

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.log_data, columns=list(self.columns))
