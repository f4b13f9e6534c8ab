"""Box-bounded search spaces for the population optimizers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionMismatchError


@dataclass(frozen=True)
class SearchSpace:
    """Axis-aligned box of feasible positions.

    ``lower`` and ``upper`` are vectors of per-dimension bounds with
    ``lower[d] < upper[d]`` everywhere.
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.ndim != 1 or upper.ndim != 1 or lower.shape != upper.shape:
            raise ConfigError("search-space bounds must be 1-D vectors of equal length")
        if lower.size == 0:
            raise ConfigError("search space needs at least one dimension")
        if not (np.isfinite(lower).all() and np.isfinite(upper).all()):
            raise ConfigError("search-space bounds must be finite")
        if not (lower < upper).all():
            bad = int(np.argmin(upper - lower))
            raise ConfigError(
                f"lower bound must be strictly below upper bound (dimension {bad}: "
                f"{lower[bad]} >= {upper[bad]})"
            )

    @property
    def dimension(self) -> int:
        return self.lower.size

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)


def clip_to_bounds(position: np.ndarray, space: SearchSpace) -> np.ndarray:
    """Component-wise clamp of ``position`` into the closed box of ``space``."""
    position = np.asarray(position, dtype=float)
    if position.shape != space.lower.shape:
        raise DimensionMismatchError(
            f"position has length {position.size}, space has dimension {space.dimension}"
        )
    return np.minimum(np.maximum(position, space.lower), space.upper)
