"""Request and reply bodies for the HTTP service.

Everything is JSON except frame fetches, which return raw P6 PPM bytes.
Error replies share one shape: {"error": {"code", "message", "stage"}}.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, model_validator


class ScenarioRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    spec: str


class ScenarioCreated(BaseModel):
    scenario_id: str


class VideoCreated(BaseModel):
    video_id: str
    frames: int
    width: int
    height: int


class RunConfigPatch(BaseModel):
    """Per-run overrides; backend and transport settings stay server-side."""

    model_config = ConfigDict(extra="forbid")
    horizon: Optional[int] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    epsilon: Optional[float] = None
    threshold: Optional[float] = None
    fps: Optional[int] = None
    scale: Optional[int] = None


class RunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    scenario_id: Optional[str] = None
    video_id: Optional[str] = None
    intervention: str
    config: Optional[RunConfigPatch] = None

    @model_validator(mode="after")
    def _one_input(self):
        if (self.scenario_id is None) == (self.video_id is None):
            raise ValueError("provide exactly one of scenario_id or video_id")
        return self


class RunCreated(BaseModel):
    run_id: str
    status: str


class SampleMetrics(BaseModel):
    psnr_mean: float
    ssim_mean: float
    frame_coherence: float
    grounding_iou: float
    intervention_success: float


class SampleStatus(BaseModel):
    index: int
    provenance: str
    frames: int
    consistency: float
    metrics: SampleMetrics
    twin_url: str
    frames_url: str


class FactualStatus(BaseModel):
    frames: int
    twin_url: str
    frames_url: str


class ErrorInfo(BaseModel):
    code: str
    message: str
    stage: Optional[str] = None


class RunStatus(BaseModel):
    run_id: str
    status: Literal["pending", "running", "complete", "failed"]
    stage: Optional[str] = None
    intervention: Optional[str] = None
    at_frame: Optional[int] = None
    horizon: Optional[int] = None
    fps: Optional[int] = None
    width: Optional[int] = None
    height: Optional[int] = None
    factual: Optional[FactualStatus] = None
    samples: list[SampleStatus] = []
    warnings: list[str] = []
    error: Optional[ErrorInfo] = None


class DeleteReply(BaseModel):
    deleted: str


class RunList(BaseModel):
    runs: list[str]


class ErrorReply(BaseModel):
    error: ErrorInfo
