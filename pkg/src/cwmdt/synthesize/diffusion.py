"""HTTP client for the external video diffusion backend.

Wire contract: multipart POST with the edited first frame as a binary
PPM part ("first_frame"), the conditioning twin document as text
("twin"), and the requested frame count ("frames"). The service replies
with that many concatenated binary PPM frames. Frame count and
dimensions are validated; content is only checked later by the
pipeline's frame-0 consistency score.
"""

from __future__ import annotations

from dataclasses import dataclass

import httpx

from ..errors import (
    BudgetExceeded,
    ConfigurationError,
    DimensionMismatch,
    FrameCountMismatch,
    InvalidParam,
    TransportError,
)
from ..twin.condense import CondensedTwin, serialize_condensed
from ..twin.codec import serialize_twin
from ..twin.model import TwinSequence
from ..video import Frame, Video, decode_ppm_stream, encode_ppm


@dataclass(frozen=True)
class DiffusionConfig:
    backend: str = "deterministic"  # deterministic | diffusion
    endpoint: str | None = None
    token: str | None = None
    timeout: float = 30.0
    retries: int = 0

    def __post_init__(self) -> None:
        if self.backend not in ("deterministic", "diffusion"):
            raise InvalidParam(f"unknown synthesize backend {self.backend!r}")
        if self.retries < 0:
            raise InvalidParam("retry budget must be non-negative")


@dataclass(frozen=True)
class SynthesisRequest:
    edited_first_frame: Frame
    twin: CondensedTwin | TwinSequence
    frames: int
    fps: int = 24

    def __post_init__(self) -> None:
        if self.frames < 1:
            raise InvalidParam(f"frame count must be at least 1, got {self.frames}")

    def twin_text(self) -> str:
        if isinstance(self.twin, TwinSequence):
            return serialize_twin(self.twin)
        return serialize_condensed(self.twin)


def diffusion_synthesize(request: SynthesisRequest, config: DiffusionConfig) -> Video:
    if not config.endpoint:
        raise ConfigurationError("diffusion backend requires diffusion.endpoint")
    headers = {}
    if config.token:
        headers["Authorization"] = f"Bearer {config.token}"
    files = {
        "first_frame": (
            "first_frame.ppm",
            encode_ppm(request.edited_first_frame),
            "image/x-portable-pixmap",
        )
    }
    data = {"twin": request.twin_text(), "frames": str(request.frames)}

    last: Exception | None = None
    reply = None
    for _ in range(config.retries + 1):
        try:
            reply = httpx.post(
                config.endpoint,
                files=files,
                data=data,
                headers=headers,
                timeout=config.timeout,
            )
        except httpx.TimeoutException as exc:
            raise BudgetExceeded(f"backend timed out after {config.timeout}s") from exc
        except httpx.HTTPError as exc:
            last = exc
            reply = None
            continue
        if reply.status_code != 200:
            last = TransportError(f"backend returned HTTP {reply.status_code}")
            reply = None
            continue
        break
    if reply is None:
        raise TransportError(f"backend unreachable: {last}")

    video = decode_ppm_stream(reply.content)
    if len(video.frames) != request.frames:
        raise FrameCountMismatch(
            f"requested {request.frames} frames, received {len(video.frames)}"
        )
    want = (request.edited_first_frame.width, request.edited_first_frame.height)
    for i, frame in enumerate(video.frames):
        if (frame.width, frame.height) != want:
            raise DimensionMismatch(
                f"frame {i} is {frame.width}x{frame.height}, expected {want[0]}x{want[1]}"
            )
    return Video(frames=video.frames, fps=request.fps)
