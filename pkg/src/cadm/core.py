"""Shared domain types and the chunked-stream abstraction.

A stream is anything with ``next_chunk() -> Chunk | None`` plus declared
``n_classes`` and ``dimension``. Chunks carry the ground-truth labels, but
detectors must only reach them through a label oracle; the ``y`` column is
the oracle's secret.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Protocol, Sequence

import numpy as np


@dataclass(frozen=True)
class Sample:
    """One observation: a feature vector plus an optional class label."""

    features: tuple
    label: Optional[int] = None


@dataclass(frozen=True)
class Chunk:
    """A fixed-size, ordered batch of samples.

    ``X`` is the (n, d) feature matrix, ``y`` the hidden per-sample labels
    (or None when the source genuinely has none). ``index`` is 1-based and
    strictly increasing along a stream.
    """

    index: int
    X: np.ndarray
    y: Optional[np.ndarray] = None

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] < 1:
            raise ValueError("chunk features must be a non-empty 2-D array")
        if self.index < 1:
            raise ValueError("chunk index is 1-based")
        object.__setattr__(self, "X", X)
        if self.y is not None:
            y = np.asarray(self.y, dtype=np.int64)
            if y.shape != (X.shape[0],):
                raise ValueError("labels must be one per sample")
            if np.any(y < 0):
                raise ValueError("labels must be non-negative class indices")
            object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def dimension(self) -> int:
        return self.X.shape[1]

    def samples(self) -> Iterator[Sample]:
        for j in range(self.n):
            label = None if self.y is None else int(self.y[j])
            yield Sample(tuple(self.X[j]), label)

    @classmethod
    def from_samples(cls, index: int, samples: Sequence[Sample]) -> "Chunk":
        if not samples:
            raise ValueError("cannot build an empty chunk")
        dims = {len(s.features) for s in samples}
        if len(dims) != 1:
            raise ValueError("all samples in a chunk must share one dimension")
        X = np.array([s.features for s in samples], dtype=np.float64)
        labels = [s.label for s in samples]
        if all(l is None for l in labels):
            return cls(index, X, None)
        if any(l is None for l in labels):
            raise ValueError("chunk labels must be all present or all absent")
        return cls(index, X, np.array(labels, dtype=np.int64))


@dataclass(frozen=True)
class StreamConfig:
    """Static shape of a stream: dimension, classes, chunking, seed."""

    dimension: int
    n_classes: int
    chunk_size: int
    n_chunks: int
    seed: int = 0

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if self.n_classes < 2:
            raise ValueError("need at least two classes")
        if self.chunk_size < 1 or self.n_chunks < 1:
            raise ValueError("chunk size and chunk count must be positive")


class ChunkStream(Protocol):
    n_classes: int
    dimension: int

    def next_chunk(self) -> Optional[Chunk]: ...


def iter_chunks(stream: ChunkStream) -> Iterator[Chunk]:
    while (chunk := stream.next_chunk()) is not None:
        yield chunk


def chunk_label_oracle(chunk: Chunk, indices) -> np.ndarray:
    """Default oracle: reveal the chunk's hidden labels at ``indices``."""
    if chunk.y is None:
        raise ValueError("chunk carries no hidden labels to reveal")
    return chunk.y[np.asarray(indices, dtype=np.int64)]


def validate_prob_matrix(P: np.ndarray, n_classes: Optional[int] = None,
                         atol: float = 1e-9) -> np.ndarray:
    """Check that ``P`` is a valid (m, n) confidence matrix.

    Every entry must lie in [0, 1] and every column must sum to 1 within
    ``atol``. Returns ``P`` unchanged; raises ValueError on violation.
    """
    P = np.asarray(P)
    if P.ndim != 2:
        raise ValueError("confidence matrix must be 2-D (classes x samples)")
    if n_classes is not None and P.shape[0] != n_classes:
        raise ValueError(f"expected {n_classes} class rows, got {P.shape[0]}")
    if P.size and (P.min() < 0.0 or P.max() > 1.0):
        raise ValueError("confidences must lie in [0, 1]")
    if P.shape[1]:
        sums = P.sum(axis=0)
        if np.max(np.abs(sums - 1.0)) > atol:
            raise ValueError("confidence columns must sum to 1")
    return P


# --- file-based streams -------------------------------------------------
#
# CSV schema: header "f0,...,f{d-1},label", one row per sample. Floats are
# written with repr() so an export/replay round trip is bit-exact.


class CsvStream:
    """Replays a labeled CSV file in fixed-size chunks.

    Rows beyond the last full chunk are dropped (chunk size is fixed by
    contract). Labels stay hidden behind the oracle interface.
    """

    def __init__(self, path, chunk_size: int):
        if chunk_size < 1:
            raise ValueError("chunk size must be positive")
        self.path = str(path)
        self.chunk_size = chunk_size
        X, y = self._parse(self.path)
        self.dimension = X.shape[1]
        self.n_classes = int(y.max()) + 1
        if self.n_classes < 2:
            raise ValueError(f"{self.path}: stream must contain at least two classes")
        self._X, self._y = X, y
        self.n_chunks = X.shape[0] // chunk_size
        self._cursor = 0

    @staticmethod
    def _parse(path):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ValueError(f"{path}:1: empty file") from None
            d = len(header) - 1
            expected = [f"f{i}" for i in range(d)] + ["label"]
            if d < 1 or header != expected:
                raise ValueError(f"{path}:1: header must be f0,...,f{{d-1}},label")
            feats, labels = [], []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != d + 1:
                    raise ValueError(f"{path}:{lineno}: expected {d + 1} columns, got {len(row)}")
                try:
                    feats.append([float(v) for v in row[:d]])
                    label = int(row[d])
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: malformed numeric value") from None
                if label < 0:
                    raise ValueError(f"{path}:{lineno}: negative class label")
                labels.append(label)
        if not feats:
            raise ValueError(f"{path}: no data rows")
        return np.array(feats, dtype=np.float64), np.array(labels, dtype=np.int64)

    def reset(self) -> None:
        self._cursor = 0

    def next_chunk(self) -> Optional[Chunk]:
        if self._cursor >= self.n_chunks:
            return None
        lo = self._cursor * self.chunk_size
        hi = lo + self.chunk_size
        self._cursor += 1
        return Chunk(self._cursor, self._X[lo:hi], self._y[lo:hi])


def write_stream_csv(stream: ChunkStream, path) -> int:
    """Consume ``stream`` and write it in the CSV schema. Returns row count."""
    rows = 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header_written = False
        for chunk in iter_chunks(stream):
            if chunk.y is None:
                raise ValueError("cannot export a stream without labels")
            if not header_written:
                writer.writerow([f"f{i}" for i in range(chunk.dimension)] + ["label"])
                header_written = True
            for j in range(chunk.n):
                writer.writerow([repr(float(v)) for v in chunk.X[j]] + [int(chunk.y[j])])
                rows += 1
    if rows == 0:
        raise ValueError("stream yielded no chunks to export")
    return rows
