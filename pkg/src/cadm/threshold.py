"""Deviation-adaptive threshold over a bounded window of similarity values."""

from __future__ import annotations

from collections import deque

import numpy as np


class SimilarityWindow:
    """Bounded FIFO of recent similarity values with a mean - k*std threshold.

    Each ``update`` appends the new value (evicting the oldest once the
    window is full) and returns ``mean(window) - k * std(window)`` computed
    over the window *including* the new value. ``ddof=0`` (population std)
    is the default; a window of one value therefore thresholds at the value
    itself.
    """

    def __init__(self, capacity: int = 10, k: float = 2.0, ddof: int = 0):
        if capacity < 1:
            raise ValueError("window capacity must be at least 1")
        if k < 0:
            raise ValueError("deviation coefficient must be non-negative")
        if ddof not in (0, 1):
            raise ValueError("ddof must be 0 (population) or 1 (sample)")
        self.capacity = capacity
        self.k = float(k)
        self.ddof = ddof
        self._values: deque = deque(maxlen=capacity)

    def update(self, value: float) -> float:
        self._values.append(float(value))
        arr = np.array(self._values, dtype=np.float64)
        mean = arr.mean()
        std = arr.std(ddof=self.ddof) if arr.size > self.ddof else 0.0
        return float(mean - self.k * std)

    def reset(self) -> None:
        self._values.clear()

    @property
    def values(self) -> tuple:
        return tuple(self._values)

    def __len__(self) -> int:
        return len(self._values)
