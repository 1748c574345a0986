"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field


class DetectorCreateRequest(BaseModel):
    dimension: int = Field(ge=1)
    n_classes: int = Field(ge=2)
    classifier: Literal["gnb", "rls"] = "gnb"
    label_ratio: float = Field(default=0.2, gt=0.0, le=0.5)
    window_size: int = Field(default=10, ge=1)
    k: float = Field(default=2.0, ge=0.0)
    seed: int = 0
    detect: bool = True


class DetectorCreated(BaseModel):
    detector_id: str


class ChunkPush(BaseModel):
    """One chunk of the stream. Labels are the oracle's secret: the service
    spends only the configured label budget on training and uses the rest
    solely for prequential scoring."""

    features: List[List[float]]
    labels: List[int]


class StepTraceOut(BaseModel):
    chunk_index: int
    cosine: float
    threshold: float
    drift: bool
    labels_spent: int
    accuracy: float


class ChunkAccepted(BaseModel):
    chunk_index: int
    initialized: bool
    labels_spent: int
    trace: Optional[StepTraceOut] = None


class DriftReportOut(BaseModel):
    drifts: List[int]
    accuracy: float
    labels_spent: int
    traces: List[StepTraceOut]


class ExperimentRequest(BaseModel):
    dataset: str
    classifier: Literal["gnb", "rls"] = "gnb"
    label_ratio: float = Field(default=0.2, gt=0.0, le=0.5)
    window_size: int = Field(default=10, ge=1)
    k: float = Field(default=2.0, ge=0.0)
    chunk_size: int = Field(default=200, ge=1)
    n_chunks: int = Field(default=500, ge=2)
    drift_every: int = Field(default=25, ge=0)
    tolerance: int = Field(default=3, ge=0)
    seeds: List[int] = Field(default=[1], min_length=1)
    detect: bool = True
    out_dir: Optional[str] = None


class ExperimentResponse(BaseModel):
    summary: Dict
    files: List[str]


class HealthOut(BaseModel):
    status: str
    version: str
