"""
Uniform time grids closed at the horizon.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class TimeGrid:
    """
    Knots t_i = i * delta for i < N and t_N = T, where N is the largest
    integer with delta * (N - 1) < T.
    """
    delta: float
    horizon: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"time step must be positive, got {self.delta}")
        if not self.horizon > 0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")

    @classmethod
    def from_steps(cls, n_steps: int, horizon: float) -> "TimeGrid":
        return cls(horizon / n_steps, horizon)

    @property
    def n_steps(self) -> int:
        """N: index of the last knot."""
        k = max(0, math.ceil(self.horizon / self.delta) - 1)
        while k > 0 and k * self.delta >= self.horizon:
            k -= 1
        while (k + 1) * self.delta < self.horizon:
            k += 1
        return k + 1

    @cached_property
    def knots(self) -> np.ndarray:
        n = self.n_steps
        knots = np.empty(n + 1)
        knots[:n] = self.delta * np.arange(n)
        knots[n] = self.horizon
        knots.setflags(write=False)
        return knots

    def __len__(self) -> int:
        return len(self.knots)

    def index_at(self, t: float) -> int:
        """i with t_i <= t < t_{i+1}; the horizon maps to the last knot."""
        if t < 0 or t > self.horizon:
            raise ValueError(f"time {t} outside [0, {self.horizon}]")
        return int(np.searchsorted(self.knots, t, side="right") - 1)

    def intervals(self):
        return list(zip(self.knots[:-1], self.knots[1:]))


__all__ = ['TimeGrid']
