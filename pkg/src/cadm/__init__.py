"""Confusion-model drift detection for chunked data streams."""

__version__ = "0.1.0"

from .classifiers import (GaussianNB, IncrementalClassifier, NotFittedError,
                          RandomFeatureRLS, hard_pseudo_label, make_classifier)
from .core import (Chunk, ChunkStream, CsvStream, Sample, StreamConfig,
                   chunk_label_oracle, iter_chunks, validate_prob_matrix,
                   write_stream_csv)
from .datagen import (BoundarySpec, DriftSchedule, SyntheticStream, make_stream)
from .detector import CadmConfig, CadmDetector, DriftReport, StepTrace, run
from .experiment import ExperimentSpec, replay, run_experiment
from .metrics import (DetectionSummary, aggregate_runs, match_detections,
                      overall_accuracy)
from .similarity import sim
from .threshold import SimilarityWindow

__all__ = [
    "BoundarySpec", "CadmConfig", "CadmDetector", "Chunk", "ChunkStream",
    "CsvStream", "DetectionSummary", "DriftReport", "DriftSchedule",
    "ExperimentSpec", "GaussianNB", "IncrementalClassifier", "NotFittedError",
    "RandomFeatureRLS", "Sample", "SimilarityWindow", "StepTrace",
    "StreamConfig", "SyntheticStream", "aggregate_runs", "chunk_label_oracle",
    "hard_pseudo_label", "iter_chunks", "make_classifier", "make_stream",
    "match_detections", "overall_accuracy", "replay", "run", "run_experiment",
    "sim", "validate_prob_matrix", "write_stream_csv",
]
