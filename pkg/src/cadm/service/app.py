"""FastAPI service wrapping the detector and the experiment runner.

Detector sessions are long-lived: create one, push labeled chunks in
stream order, read the running report, delete when done. Experiments run
one-shot and write their artifacts server-side.
"""

from __future__ import annotations

import tempfile
import threading
import uuid
from typing import Dict

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..core import Chunk
from ..detector import CadmConfig, CadmDetector
from ..experiment import ExperimentSpec, run_experiment
from .schemas import (ChunkAccepted, ChunkPush, DetectorCreated,
                      DetectorCreateRequest, DriftReportOut, ExperimentRequest,
                      ExperimentResponse, HealthOut, StepTraceOut)

app = FastAPI(title="cadm", version=__version__)


class DetectorSession:
    """Single-writer detector state behind a lock."""

    def __init__(self, request: DetectorCreateRequest):
        config = CadmConfig(label_ratio=request.label_ratio,
                            window_size=request.window_size, k=request.k,
                            seed=request.seed, classifier=request.classifier,
                            detect=request.detect)
        self.detector = CadmDetector(config, request.n_classes, request.dimension)
        self.next_index = 1
        self.lock = threading.Lock()

    def push(self, payload: ChunkPush) -> ChunkAccepted:
        with self.lock:
            chunk = Chunk(self.next_index, np.asarray(payload.features, dtype=np.float64),
                          np.asarray(payload.labels, dtype=np.int64))
            if self.next_index == 1:
                spent = self.detector.initialize(chunk)
                self.next_index += 1
                return ChunkAccepted(chunk_index=chunk.index, initialized=True,
                                     labels_spent=spent)
            trace = self.detector.step(chunk)
            self.next_index += 1
            return ChunkAccepted(chunk_index=chunk.index, initialized=False,
                                 labels_spent=trace.labels_spent,
                                 trace=StepTraceOut(**trace.__dict__))

    def report(self) -> DriftReportOut:
        with self.lock:
            report = self.detector.report()
        return DriftReportOut(drifts=report.drifts, accuracy=report.accuracy,
                              labels_spent=report.labels_spent,
                              traces=[StepTraceOut(**t.__dict__) for t in report.traces])


_sessions: Dict[str, DetectorSession] = {}
_sessions_lock = threading.Lock()


def _session(detector_id: str) -> DetectorSession:
    with _sessions_lock:
        session = _sessions.get(detector_id)
    if session is None:
        raise HTTPException(status_code=404, detail=f"no detector {detector_id}")
    return session


@app.get("/health", response_model=HealthOut)
def health() -> HealthOut:
    return HealthOut(status="ok", version=__version__)


@app.post("/detectors", response_model=DetectorCreated, status_code=201)
def create_detector(request: DetectorCreateRequest) -> DetectorCreated:
    try:
        session = DetectorSession(request)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    detector_id = uuid.uuid4().hex
    with _sessions_lock:
        _sessions[detector_id] = session
    return DetectorCreated(detector_id=detector_id)


@app.post("/detectors/{detector_id}/chunks", response_model=ChunkAccepted)
def push_chunk(detector_id: str, payload: ChunkPush) -> ChunkAccepted:
    session = _session(detector_id)
    try:
        return session.push(payload)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None


@app.get("/detectors/{detector_id}/report", response_model=DriftReportOut)
def detector_report(detector_id: str) -> DriftReportOut:
    session = _session(detector_id)
    try:
        return session.report()
    except RuntimeError as exc:
        raise HTTPException(status_code=409, detail=str(exc)) from None


@app.delete("/detectors/{detector_id}", status_code=204)
def delete_detector(detector_id: str) -> None:
    with _sessions_lock:
        if _sessions.pop(detector_id, None) is None:
            raise HTTPException(status_code=404, detail=f"no detector {detector_id}")


@app.post("/experiments", response_model=ExperimentResponse)
def run_experiment_endpoint(request: ExperimentRequest) -> ExperimentResponse:
    try:
        spec = ExperimentSpec(dataset=request.dataset, classifier=request.classifier,
                              label_ratio=request.label_ratio,
                              window_size=request.window_size, k=request.k,
                              chunk_size=request.chunk_size, n_chunks=request.n_chunks,
                              drift_every=request.drift_every,
                              tolerance=request.tolerance,
                              seeds=tuple(request.seeds), detect=request.detect)
        out_dir = request.out_dir or tempfile.mkdtemp(prefix="cadm-exp-")
        result = run_experiment(spec, out_dir)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    files = [str(p) for p in result.trace_paths]
    files += [str(result.detections_path), str(result.summary_path)]
    return ExperimentResponse(summary=result.summary, files=files)
