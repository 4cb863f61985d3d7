"""HTTP service wrapping the run pipeline."""

from .app import PPM_MEDIA_TYPE, create_app, serve
from .schemas import (
    DeleteReply,
    ErrorInfo,
    ErrorReply,
    FactualStatus,
    RunConfigPatch,
    RunCreated,
    RunList,
    RunRequest,
    RunStatus,
    SampleMetrics,
    SampleStatus,
    ScenarioCreated,
    ScenarioRequest,
    VideoCreated,
)

__all__ = [
    "PPM_MEDIA_TYPE",
    "DeleteReply",
    "ErrorInfo",
    "ErrorReply",
    "FactualStatus",
    "RunConfigPatch",
    "RunCreated",
    "RunList",
    "RunRequest",
    "RunStatus",
    "SampleMetrics",
    "SampleStatus",
    "ScenarioCreated",
    "ScenarioRequest",
    "VideoCreated",
    "create_app",
    "serve",
]
