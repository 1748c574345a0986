"""Seeded synthetic 2-D drifting streams.

Features are uniform on [-1, 1]^2; a boundary predicate assigns the base
label and a drift schedule flips all labels (cumulatively) from given
chunk indices on. The PRNG is numpy's PCG64 (``default_rng``), so exports
are bit-reproducible across platforms for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .core import Chunk, StreamConfig

# boundary predicates: X is (n, 2), result is the 0/1 base label.
# Areas are balanced (inside = half the domain) except DoubleLines, whose
# achievable split is about 0.685 / 0.315 (documented, see README).

CIRCLE_R2 = 2.0 / np.pi
SQUARE_HALF_SIDE = np.sqrt(2.0) / 2.0
DOUBLE_LINES_LOW = 0.15
DOUBLE_LINES_HIGH = 1.05


def line_label(X: np.ndarray) -> np.ndarray:
    return (X[:, 1] > X[:, 0]).astype(np.int64)


def circle_label(X: np.ndarray) -> np.ndarray:
    return (X[:, 0] ** 2 + X[:, 1] ** 2 < CIRCLE_R2).astype(np.int64)


def square_label(X: np.ndarray) -> np.ndarray:
    return (np.maximum(np.abs(X[:, 0]), np.abs(X[:, 1])) < SQUARE_HALF_SIDE).astype(np.int64)


def double_lines_label(X: np.ndarray) -> np.ndarray:
    # class 0 is the strip between the parallel lines x2 = x1 + 0.15 and
    # x2 = x1 + 1.05; class 1 covers both sides (not linearly separable).
    # The strip is deliberately off-centre: both class means then move when
    # labels flip, which a per-feature Gaussian model can actually see.
    u = X[:, 1] - X[:, 0]
    return ((u <= DOUBLE_LINES_LOW) | (u >= DOUBLE_LINES_HIGH)).astype(np.int64)


_BOUNDARIES = {
    "line": line_label,
    "circle": circle_label,
    "square": square_label,
    "doubleline": double_lines_label,
}

DATASET_NAMES = tuple(_BOUNDARIES)


@dataclass(frozen=True)
class BoundarySpec:
    """A named decision boundary over [-1, 1]^2."""

    name: str
    predicate: Callable[[np.ndarray], np.ndarray]

    @classmethod
    def named(cls, name: str) -> "BoundarySpec":
        key = name.lower().replace("_", "").replace("-", "")
        key = {"doublelines": "doubleline"}.get(key, key)
        if key not in _BOUNDARIES:
            raise ValueError(f"unknown dataset {name!r} (expected one of {DATASET_NAMES})")
        return cls(key, _BOUNDARIES[key])


@dataclass(frozen=True)
class DriftSchedule:
    """Chunk indices at which every label flips (flips compose by XOR)."""

    flip_chunks: Tuple[int, ...] = ()

    def __post_init__(self):
        flips = tuple(int(i) for i in self.flip_chunks)
        if any(i < 2 for i in flips):
            raise ValueError("flips can only start from chunk 2")
        if any(b <= a for a, b in zip(flips, flips[1:])):
            raise ValueError("flip chunks must be strictly increasing")
        object.__setattr__(self, "flip_chunks", flips)

    @classmethod
    def every(cls, interval: int, n_chunks: int) -> "DriftSchedule":
        """Flips at interval+1, 2*interval+1, ... up to n_chunks; 0 means none."""
        if interval < 0:
            raise ValueError("interval must be non-negative")
        if interval == 0:
            return cls(())
        return cls(tuple(range(interval + 1, n_chunks + 1, interval)))

    def flipped_at(self, chunk_index: int) -> bool:
        return sum(1 for f in self.flip_chunks if f <= chunk_index) % 2 == 1


class SyntheticStream:
    """Deterministic drifting stream over one boundary shape."""

    def __init__(self, boundary: BoundarySpec, schedule: DriftSchedule,
                 config: StreamConfig):
        if config.dimension != 2:
            raise ValueError("synthetic streams are 2-D")
        if config.n_classes != 2:
            raise ValueError("synthetic streams are binary")
        self.boundary = boundary
        self.schedule = schedule
        self.config = config
        self.n_classes = config.n_classes
        self.dimension = config.dimension
        self._rng = np.random.default_rng(config.seed)
        self._next_index = 1

    def next_chunk(self) -> Optional[Chunk]:
        if self._next_index > self.config.n_chunks:
            return None
        index = self._next_index
        self._next_index += 1
        X = self._rng.uniform(-1.0, 1.0, size=(self.config.chunk_size, 2))
        y = self.boundary.predicate(X)
        if self.schedule.flipped_at(index):
            y = 1 - y
        return Chunk(index, X, y)

    def effective_label(self, point, chunk_index: int) -> int:
        """Ground-truth label any single point would get in ``chunk_index``."""
        base = int(self.boundary.predicate(np.asarray(point, dtype=np.float64).reshape(1, 2))[0])
        return 1 - base if self.schedule.flipped_at(chunk_index) else base


def make_stream(dataset: str, *, chunk_size: int, n_chunks: int, seed: int,
                drift_every: int = 0) -> SyntheticStream:
    """Convenience constructor used by the experiment runner and CLI."""
    config = StreamConfig(dimension=2, n_classes=2, chunk_size=chunk_size,
                          n_chunks=n_chunks, seed=seed)
    return SyntheticStream(BoundarySpec.named(dataset),
                           DriftSchedule.every(drift_every, n_chunks), config)
