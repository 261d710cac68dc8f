from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Mapping, Sequence

if TYPE_CHECKING:
    from typing import Self

import numpy as np

from exchange_kinetics.exceptions import InsufficientWindowError, NormalizationError

MASS_TOLERANCE = 1e-12
DEFAULT_TAIL_THRESHOLD = 1e-14


@dataclass(frozen=True)
class LatticeVector:
    """
    Dense vector indexed by consecutive integer wealth values.
    offset: int
        Wealth value of the first slot.
    values: np.ndarray
        One entry per wealth value offset, offset + 1, ...
    """

    offset: int
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64).ravel()
        values.setflags(write=False)
        object.__setattr__(self, "offset", int(self.offset))
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.offset == other.offset and np.array_equal(self.values, other.values)

    @property
    def n_min(self) -> int:
        return self.offset

    @property
    def n_max(self) -> int:
        return self.offset + len(self.values) - 1

    @property
    def support(self) -> np.ndarray:
        """Wealth value of every slot."""
        return np.arange(self.n_min, self.n_max + 1, dtype=np.int64)

    def at(self, n: int) -> float:
        """Entry at wealth n; zero outside the window."""
        k = n - self.offset
        if 0 <= k < len(self.values):
            return float(self.values[k])
        return 0.0

    def index_of(self, n: int) -> int:
        return n - self.offset

    def as_dict(self) -> dict[int, float]:
        return {int(n): float(v) for n, v in zip(self.support, self.values)}

    def padded(self, left: int, right: int) -> Self:
        """Copy with `left` zero slots prepended and `right` zero slots appended."""
        values = np.concatenate([np.zeros(left), self.values, np.zeros(right)])
        return self._replace(self.offset - left, values)

    def covering(self, n_min: int, n_max: int) -> Self:
        """Copy whose window contains [n_min, n_max] (never shrinks)."""
        left = max(0, self.n_min - n_min)
        right = max(0, n_max - self.n_max)
        if left == 0 and right == 0:
            return self
        return self.padded(left, right)

    def _replace(self, offset: int, values: np.ndarray) -> Self:
        return type(self)(offset, values)


@dataclass(frozen=True, eq=False)
class RateVector(LatticeVector):
    """Time derivative of a PMF; entries may be negative and sum to zero."""


@dataclass(frozen=True, eq=False)
class WealthPMF(LatticeVector):
    """
    Probability mass function over a finite window of integer wealth values.
    Negative wealth (debt) is allowed. Construction rejects negative entries and
    a total mass farther than 1e-12 from one; use `from_weights` to normalize.
    tail_threshold: float
        A window whose first or last slot exceeds this value is flagged insufficient.
    """

    tail_threshold: float = field(default=DEFAULT_TAIL_THRESHOLD, compare=False)

    def __post_init__(self) -> None:
        super().__post_init__()
        if len(self.values) == 0:
            raise NormalizationError("a PMF needs at least one slot")
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise NormalizationError("PMF entries must be finite and non-negative")
        total = float(self.values.sum())
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise NormalizationError(f"PMF mass is {total!r}, expected 1 within {MASS_TOLERANCE}")

    @property
    def probs(self) -> np.ndarray:
        return self.values

    @property
    def is_window_sufficient(self) -> bool:
        return bool(self.values[0] <= self.tail_threshold and self.values[-1] <= self.tail_threshold)

    def require_sufficient_window(self) -> None:
        if not self.is_window_sufficient:
            raise InsufficientWindowError(
                f"boundary mass ({self.values[0]:.3e}, {self.values[-1]:.3e}) on [{self.n_min}, {self.n_max}] "
                f"exceeds tail threshold {self.tail_threshold:.1e}"
            )

    def trimmed(self, threshold: float = 0.0) -> "WealthPMF":
        """Drop outer slots whose mass is at most `threshold`, then renormalize."""
        keep = np.flatnonzero(self.values > threshold)
        if len(keep) == 0:
            return self
        lo, hi = keep[0], keep[-1]
        return WealthPMF.from_weights(self.offset + lo, self.values[lo : hi + 1], self.tail_threshold)

    def _replace(self, offset: int, values: np.ndarray) -> "WealthPMF":
        return WealthPMF(offset, values, self.tail_threshold)

    @classmethod
    def from_weights(
        cls, offset: int, weights: Sequence[float] | np.ndarray, tail_threshold: float = DEFAULT_TAIL_THRESHOLD
    ) -> "WealthPMF":
        weights = np.asarray(weights, dtype=np.float64)
        total = weights.sum()
        if not total > 0:
            raise NormalizationError("weights must have a positive sum")
        return cls(offset, weights / total, tail_threshold)

    @classmethod
    def delta(cls, n: int) -> "WealthPMF":
        return cls(n, np.ones(1))

    @classmethod
    def from_mapping(cls, masses: Mapping[int, float], normalize: bool = False) -> "WealthPMF":
        if not masses:
            raise NormalizationError("empty mapping")
        n_min, n_max = min(masses), max(masses)
        values = np.zeros(n_max - n_min + 1)
        for n, p in masses.items():
            values[n - n_min] = p
        if normalize:
            return cls.from_weights(n_min, values)
        return cls(n_min, values)

    @classmethod
    def from_samples(cls, wealth: np.ndarray) -> "WealthPMF":
        """Empirical law of an integer sample."""
        wealth = np.asarray(wealth, dtype=np.int64)
        if wealth.size == 0:
            raise NormalizationError("empty sample")
        n_min = int(wealth.min())
        counts = np.bincount(wealth - n_min)
        return cls(n_min, counts / wealth.size)

    @classmethod
    def point_mass_at_mean(cls, mu: float) -> "WealthPMF":
        """Delta at mu when mu is an integer, otherwise the two-point law on floor/ceil with mean mu."""
        lo = int(np.floor(mu))
        frac = mu - lo
        if frac < 1e-12:
            return cls.delta(lo)
        return cls(lo, np.array([1.0 - frac, frac]))


def align(*vectors: LatticeVector) -> tuple[int, list[np.ndarray]]:
    """Values of every vector on the union window; returns (offset, arrays)."""
    n_min = min(v.n_min for v in vectors)
    n_max = max(v.n_max for v in vectors)
    arrays = []
    for v in vectors:
        out = np.zeros(n_max - n_min + 1)
        out[v.n_min - n_min : v.n_max - n_min + 1] = v.values
        arrays.append(out)
    return n_min, arrays
