"""Per-class cosine similarity between two prediction matrices."""

from __future__ import annotations

import math

import numpy as np


def _row_cosine(a: np.ndarray, b: np.ndarray) -> float:
    # Bitwise-equal rows must read exactly 1.0 (covers the post-reset case
    # where both models are identical), and both-zero rows count as
    # agreement that the class is absent.
    if np.array_equal(a, b):
        return 1.0
    aa = float(a @ a)
    bb = float(b @ b)
    if aa == 0.0 or bb == 0.0:
        # exactly one zero-norm row: maximal disagreement for that class
        return 0.0
    cos = float(a @ b) / math.sqrt(aa * bb)
    return min(1.0, max(-1.0, cos))


def sim(prev: np.ndarray, curr: np.ndarray) -> float:
    """Mean over classes of the cosine between corresponding class rows.

    Both inputs are (m, n) matrices whose row i is one model's confidence
    for class i across the n samples. Returns a value in [-1, 1]; for
    entrywise non-negative inputs the value lies in [0, 1]. Smaller means
    the two models disagree more.
    """
    A = np.asarray(prev, dtype=np.float64)
    B = np.asarray(curr, dtype=np.float64)
    if A.ndim != 2 or B.ndim != 2 or A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    m = A.shape[0]
    if m < 1:
        raise ValueError("need at least one class row")
    return math.fsum(_row_cosine(A[i], B[i]) for i in range(m)) / m
