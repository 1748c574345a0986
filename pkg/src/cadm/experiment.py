"""Experiment runner: seeded end-to-end runs with machine-readable outputs.

Per seed it writes a trace CSV (one row per stepped chunk), plus one
detections CSV and one summary JSON for the whole experiment. Floats in
CSVs carry 9 significant digits and JSON numbers are unrounded, so a rerun
with an identical spec is byte-identical. Output files never embed the
output directory itself, which keeps two runs into different directories
comparable.
"""

from __future__ import annotations

import concurrent.futures
import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import metrics
from .core import CsvStream, ChunkStream
from .datagen import DATASET_NAMES, DriftSchedule, make_stream
from .detector import CadmConfig, DriftReport, StepTrace, run

TRACE_SCHEMA = "cadm-trace/1"
DETECTIONS_SCHEMA = "cadm-detections/1"
SUMMARY_SCHEMA = "cadm-summary/1"

TRACE_COLUMNS = ("chunk_index", "cosine", "threshold", "drift_flag",
                 "labels_spent", "chunk_accuracy")


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything that identifies one experiment (output dir excluded)."""

    dataset: str                       # named generator or "csv:<path>"
    classifier: str = "gnb"
    label_ratio: float = 0.2
    window_size: int = 10
    k: float = 2.0
    chunk_size: int = 200
    n_chunks: int = 500
    drift_every: int = 25
    tolerance: int = 3
    seeds: Tuple[int, ...] = (1,)
    detect: bool = True
    jobs: int = 1

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("need at least one seed")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be distinct")
        if self.jobs < 1:
            raise ValueError("jobs must be positive")
        if not self.csv_path and self.dataset not in DATASET_NAMES:
            raise ValueError(
                f"unknown dataset {self.dataset!r}; expected one of "
                f"{DATASET_NAMES} or csv:<path>")
        if self.csv_path and not Path(self.csv_path).exists():
            raise ValueError(f"csv stream not found: {self.csv_path}")

    @property
    def csv_path(self) -> Optional[str]:
        return self.dataset[4:] if self.dataset.startswith("csv:") else None

    def identity(self) -> Dict:
        return {
            "dataset": self.dataset,
            "classifier": self.classifier,
            "label_ratio": self.label_ratio,
            "window_size": self.window_size,
            "k": self.k,
            "chunk_size": self.chunk_size,
            "n_chunks": self.n_chunks,
            "drift_every": self.drift_every,
            "tolerance": self.tolerance,
            "seeds": list(self.seeds),
            "detect": self.detect,
        }


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    summary: Dict
    reports: List[DriftReport]
    trace_paths: List[Path]
    detections_path: Path
    summary_path: Path


def _build_stream(spec: ExperimentSpec, seed: int) -> ChunkStream:
    if spec.csv_path:
        return CsvStream(spec.csv_path, spec.chunk_size)
    return make_stream(spec.dataset, chunk_size=spec.chunk_size,
                       n_chunks=spec.n_chunks, seed=seed,
                       drift_every=spec.drift_every)


def _detector_config(spec: ExperimentSpec, seed: int) -> CadmConfig:
    return CadmConfig(label_ratio=spec.label_ratio, window_size=spec.window_size,
                      k=spec.k, seed=seed, classifier=spec.classifier,
                      detect=spec.detect)


def _seed_run(spec: ExperimentSpec, seed: int) -> DriftReport:
    stream = _build_stream(spec, seed)
    return run(stream, _detector_config(spec, seed))


def true_drift_chunks(spec: ExperimentSpec) -> Tuple[int, ...]:
    """Drift schedule the experiment is scored against.

    For CSV streams the schedule cannot be read off the file, so
    ``drift_every`` declares it (0 for none/unknown).
    """
    n_chunks = spec.n_chunks
    if spec.csv_path:
        n_chunks = CsvStream(spec.csv_path, spec.chunk_size).n_chunks
    return DriftSchedule.every(spec.drift_every, n_chunks).flip_chunks


def replay(csv_path, config: CadmConfig, chunk_size: int) -> DriftReport:
    """Run the detector over a file-backed stream; labels come from the file."""
    return run(CsvStream(csv_path, chunk_size), config)


# --- file formats --------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.9g}"


def write_trace_csv(path, traces: Sequence[StepTrace]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# schema: {TRACE_SCHEMA}\n")
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for t in traces:
            writer.writerow([t.chunk_index, _fmt(t.cosine), _fmt(t.threshold),
                             int(t.drift), t.labels_spent, _fmt(t.accuracy)])


def read_trace_csv(path) -> List[StepTrace]:
    traces = []
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows or tuple(rows[0]) != TRACE_COLUMNS:
        raise ValueError(f"{path}: not a {TRACE_SCHEMA} file")
    for row in rows[1:]:
        traces.append(StepTrace(chunk_index=int(row[0]), cosine=float(row[1]),
                                threshold=float(row[2]), drift=bool(int(row[3])),
                                labels_spent=int(row[4]), accuracy=float(row[5])))
    return traces


def write_detections_csv(path, per_seed: Sequence[Tuple[int, Sequence[int]]]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# schema: {DETECTIONS_SCHEMA}\n")
        writer = csv.writer(fh)
        writer.writerow(["seed", "chunk_index"])
        for seed, detections in per_seed:
            for d in detections:
                writer.writerow([seed, d])


# --- the runner ----------------------------------------------------------

def run_experiment(spec: ExperimentSpec, out_dir) -> ExperimentResult:
    """Run every seed, write traces/detections/summary, return it all."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    seeds = list(spec.seeds)
    if spec.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            reports = list(pool.map(_seed_run, [spec] * len(seeds), seeds))
    else:
        reports = [_seed_run(spec, seed) for seed in seeds]

    truths = true_drift_chunks(spec)
    runs = []
    trace_paths = []
    for seed, report in zip(seeds, reports):
        summary = metrics.match_detections(truths, report.drifts, spec.tolerance)
        trace_path = out / f"trace_seed{seed}.csv"
        write_trace_csv(trace_path, report.traces)
        trace_paths.append(trace_path)
        runs.append({
            "seed": seed,
            "detections": list(report.drifts),
            "delays": list(summary.delays),
            "false_alarms": list(summary.false_alarms),
            "false_negatives": summary.false_negatives,
            "detection_rate": summary.detection_rate,
            "accuracy": report.accuracy,
            "labels_spent": report.labels_spent,
        })

    acc_mean, acc_std = reports[0].accuracy, None
    if len(reports) >= 2:
        acc_mean, acc_std = metrics.aggregate_runs(reports)
    aggregate = {
        "accuracy_mean": acc_mean,
        "accuracy_std": acc_std,
        "detection_rate_mean": float(np.mean([r["detection_rate"] for r in runs])),
        "false_alarms_mean": float(np.mean([len(r["false_alarms"]) for r in runs])),
    }
    summary_doc = {
        "schema": SUMMARY_SCHEMA,
        "spec": spec.identity(),
        "true_drifts": list(truths),
        "runs": runs,
        "aggregate": aggregate,
    }

    detections_path = out / "detections.csv"
    write_detections_csv(detections_path, [(r["seed"], r["detections"]) for r in runs])
    summary_path = out / "summary.json"
    with open(summary_path, "w") as fh:
        json.dump(summary_doc, fh, indent=2)
        fh.write("\n")

    return ExperimentResult(spec, summary_doc, reports, trace_paths,
                            detections_path, summary_path)
