"""Confusion-model drift detection loop for chunked streams.

Two copies of one incremental classifier travel through the stream: the
current model learns from every chunk (a seeded random slice of oracle
labels plus an equally large disjoint slice of its own hard pseudo
labels), while the reference model lags exactly one update behind. Both
predict each incoming chunk; when the mean per-class cosine between their
confidence matrices falls below the deviation-adaptive threshold, drift is
declared and everything restarts from fresh labels on that chunk.

The deliberately mixed update (true labels + pseudo labels) is what makes
real drift visible: after a label flip, purchased labels contradict the
pseudo labels, the current model gets confused, and its predictions pull
away from the reference copy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .classifiers import hard_pseudo_label, make_classifier
from .core import Chunk, ChunkStream, chunk_label_oracle
from .similarity import sim
from .threshold import SimilarityWindow

LabelOracle = Callable[[Chunk, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CadmConfig:
    """Knobs of the detection loop.

    ``label_ratio`` is the fraction of each chunk bought from the oracle
    (an equal disjoint fraction is pseudo-labeled, so it must stay <= 0.5).
    ``detect=False`` disables the drift branch entirely; the loop then
    degenerates to plain incremental learning, which is the no-detection
    baseline used in the accuracy comparisons.
    """

    label_ratio: float = 0.2
    window_size: int = 10
    k: float = 2.0
    seed: int = 0
    classifier: str = "gnb"
    detect: bool = True
    std_ddof: int = 0
    max_redraws: int = 10

    def __post_init__(self):
        if not 0.0 < self.label_ratio <= 0.5:
            raise ValueError("label ratio must lie in (0, 0.5]")
        if self.window_size < 1:
            raise ValueError("window size must be at least 1")
        if self.k < 0:
            raise ValueError("deviation coefficient must be non-negative")
        if self.max_redraws < 0:
            raise ValueError("max redraws must be non-negative")

    def labels_per_chunk(self, chunk_size: int) -> int:
        return math.floor(self.label_ratio * chunk_size)


@dataclass(frozen=True)
class StepTrace:
    """Per-chunk record: what was measured, decided, and spent."""

    chunk_index: int
    cosine: float
    threshold: float
    drift: bool
    labels_spent: int
    accuracy: float


@dataclass
class DriftReport:
    """Outcome of a full run: detections, per-chunk traces, mean accuracy."""

    drifts: List[int]
    traces: List[StepTrace]
    accuracy: float
    labels_spent: int = 0


class CadmDetector:
    """Stateful detector: ``initialize`` on chunk 1, then ``step`` per chunk."""

    def __init__(self, config: CadmConfig, n_classes: int, dimension: int):
        if n_classes < 2:
            raise ValueError("need at least two classes")
        self.config = config
        self.n_classes = n_classes
        self.dimension = dimension
        self.window = SimilarityWindow(config.window_size, config.k, config.std_ddof)
        self._rng = np.random.default_rng(config.seed)
        self.prev_model = None   # reference copy, one update behind
        self.curr_model = None   # model receiving every update
        self.drifts: List[int] = []
        self.traces: List[StepTrace] = []
        self.labels_spent = 0
        self.init_labeled_indices_: Optional[np.ndarray] = None
        self.last_labeled_indices_: Optional[np.ndarray] = None
        self.last_pseudo_indices_: Optional[np.ndarray] = None

    # --- labeled draws ---------------------------------------------------

    def _budget(self, chunk: Chunk) -> int:
        n_lab = self.config.labels_per_chunk(chunk.n)
        if n_lab < 1:
            raise ValueError(
                f"label budget floor({self.config.label_ratio} * {chunk.n}) is zero")
        return n_lab

    def _draw_for_fit(self, chunk: Chunk, oracle: LabelOracle, strict: bool):
        """Uniform labeled draw for a from-scratch fit.

        Redraws up to ``max_redraws`` times when the draw covers a single
        class. ``strict`` failures raise; otherwise the last single-class
        draw is accepted and the classifier's degenerate fit handles it.
        """
        n_lab = self._budget(chunk)
        idx = labels = None
        for _ in range(self.config.max_redraws + 1):
            idx = self._rng.permutation(chunk.n)[:n_lab]
            labels = oracle(chunk, idx)
            if np.unique(labels).size >= 2:
                return idx, labels
        if strict:
            raise ValueError(
                f"labeled draw on chunk {chunk.index} produced a single class "
                f"after {self.config.max_redraws + 1} attempts")
        return idx, labels

    # --- the loop ----------------------------------------------------------

    def initialize(self, chunk: Chunk, oracle: LabelOracle = chunk_label_oracle) -> int:
        """Fit both models on a fresh labeled slice of the first chunk."""
        if chunk.dimension != self.dimension:
            raise ValueError(f"expected {self.dimension}-D chunks, got {chunk.dimension}-D")
        idx, labels = self._draw_for_fit(chunk, oracle, strict=True)
        clf = make_classifier(self.config.classifier, self.n_classes,
                              self.dimension, seed=self.config.seed)
        clf.fit(chunk.X[idx], labels)
        self.curr_model = clf
        self.prev_model = clf.snapshot()
        self.window.reset()
        self.init_labeled_indices_ = idx
        self.labels_spent += len(idx)
        return len(idx)

    def step(self, chunk: Chunk, oracle: LabelOracle = chunk_label_oracle) -> StepTrace:
        if self.curr_model is None:
            raise RuntimeError("detector not initialized; feed the first chunk first")
        if chunk.dimension != self.dimension:
            raise ValueError(f"expected {self.dimension}-D chunks, got {chunk.dimension}-D")
        X = chunk.X
        n_lab = self._budget(chunk)

        h_prev = self.prev_model.predict_prob(X)
        h_curr = self.curr_model.predict_prob(X)
        cosine = sim(h_prev, h_curr)
        thresh = self.window.update(cosine)

        # prequential: score the pre-update model before learning from the chunk
        y_true = oracle(chunk, np.arange(chunk.n))
        accuracy = float(np.mean(np.argmax(h_curr, axis=0) == y_true))

        drift = self.config.detect and cosine < thresh
        if drift:
            self.drifts.append(chunk.index)
            self.window.reset()
            idx, labels = self._draw_for_fit(chunk, oracle, strict=False)
            self.curr_model.fit(X[idx], labels)
            self.prev_model = self.curr_model.snapshot()
            self.last_labeled_indices_ = idx
            self.last_pseudo_indices_ = None
        else:
            perm = self._rng.permutation(chunk.n)
            lab_idx = perm[:n_lab]
            pseudo_idx = perm[n_lab:2 * n_lab]
            y_lab = oracle(chunk, lab_idx)
            y_pseudo = hard_pseudo_label(self.curr_model, X[pseudo_idx])
            self.prev_model = self.curr_model.snapshot()
            self.curr_model.partial_fit(
                np.concatenate([X[lab_idx], X[pseudo_idx]]),
                np.concatenate([y_lab, y_pseudo]))
            self.last_labeled_indices_ = lab_idx
            self.last_pseudo_indices_ = pseudo_idx

        self.labels_spent += n_lab
        trace = StepTrace(chunk.index, cosine, thresh, drift, n_lab, accuracy)
        self.traces.append(trace)
        return trace

    def report(self) -> DriftReport:
        if not self.traces:
            raise RuntimeError("no chunks processed beyond initialization")
        accuracy = float(np.mean([t.accuracy for t in self.traces]))
        return DriftReport(list(self.drifts), list(self.traces), accuracy,
                           labels_spent=self.labels_spent)


def run(stream: ChunkStream, config: CadmConfig,
        oracle: LabelOracle = chunk_label_oracle) -> DriftReport:
    """Consume a whole stream: initialize on chunk 1, step through the rest."""
    first = stream.next_chunk()
    if first is None:
        raise ValueError("stream yielded no chunks")
    detector = CadmDetector(config, stream.n_classes, stream.dimension)
    detector.initialize(first, oracle)
    steps = 0
    while (chunk := stream.next_chunk()) is not None:
        detector.step(chunk, oracle)
        steps += 1
    if steps == 0:
        raise ValueError("stream must yield at least 2 chunks")
    return detector.report()
