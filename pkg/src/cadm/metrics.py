"""Detection-quality and accuracy metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .detector import DriftReport, StepTrace

DEFAULT_TOLERANCE = 3


@dataclass(frozen=True)
class DetectionSummary:
    """Greedy in-order matching of detections to true drifts.

    ``matched[i]`` is the detection chunk matched to ``true_drifts[i]`` or
    None for a miss; ``delays`` aligns with the matched pairs in order.
    """

    true_drifts: Tuple[int, ...]
    detections: Tuple[int, ...]
    tolerance: int
    matched: Tuple[Optional[int], ...]
    delays: Tuple[int, ...]
    false_alarms: Tuple[int, ...]

    @property
    def n_matched(self) -> int:
        return len(self.delays)

    @property
    def false_negatives(self) -> int:
        return sum(1 for m in self.matched if m is None)

    @property
    def detection_rate(self) -> float:
        if not self.true_drifts:
            return 1.0
        return self.n_matched / len(self.true_drifts)


def _check_increasing(name: str, values: Sequence[int]) -> Tuple[int, ...]:
    vals = tuple(int(v) for v in values)
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ValueError(f"{name} must be strictly increasing")
    return vals


def match_detections(true_drifts: Sequence[int], detections: Sequence[int],
                     tolerance: int = DEFAULT_TOLERANCE) -> DetectionSummary:
    """Match each detection to the earliest unmatched true drift g with
    g <= d <= g + tolerance; leftovers are false alarms / false negatives.
    """
    if tolerance < 0:
        raise ValueError("tolerance must be non-negative")
    truths = _check_increasing("true drifts", true_drifts)
    dets = _check_increasing("detections", detections)
    matched: List[Optional[int]] = [None] * len(truths)
    delays: List[int] = []
    false_alarms: List[int] = []
    for d in dets:
        for i, g in enumerate(truths):
            if matched[i] is None and g <= d <= g + tolerance:
                matched[i] = d
                delays.append(d - g)
                break
        else:
            false_alarms.append(d)
    return DetectionSummary(truths, dets, tolerance, tuple(matched),
                            tuple(delays), tuple(false_alarms))


def overall_accuracy(traces: Sequence[StepTrace]) -> float:
    """Mean per-chunk prequential accuracy over all stepped chunks."""
    if not traces:
        raise ValueError("need at least one trace")
    return float(np.mean([t.accuracy for t in traces]))


def aggregate_runs(reports: Sequence[DriftReport]) -> Tuple[float, float]:
    """Sample mean and sample (n-1) std of overall accuracy across runs."""
    if len(reports) < 2:
        raise ValueError("need at least two runs to aggregate")
    accs = np.array([r.accuracy for r in reports], dtype=np.float64)
    return float(accs.mean()), float(accs.std(ddof=1))
