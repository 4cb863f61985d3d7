"""Evaluation report assembly and text/CSV emission."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import SchemaError
from ..intervene.dsl import Intervention
from ..synthesize.render import RenderStyle, render_video
from ..twin.model import TwinSequence
from ..video import Video
from .grounding import grounding_iou
from .quality import frame_coherence, psnr, ssim
from .success import intervention_success

_FIELDS = (
    "psnr_mean",
    "ssim_mean",
    "frame_coherence",
    "grounding_iou",
    "intervention_success",
)


@dataclass(frozen=True)
class FrameScores:
    frame: int
    psnr: float
    ssim: float


@dataclass(frozen=True)
class EvalReport:
    psnr_mean: float
    ssim_mean: float
    frame_coherence: float
    grounding_iou: float
    intervention_success: float
    per_frame: tuple[FrameScores, ...] = ()

    def __post_init__(self) -> None:
        for name in _FIELDS:
            if not math.isfinite(getattr(self, name)):
                raise SchemaError(f"{name} is not finite", name)

    def to_text(self) -> str:
        return "".join(f"{name} = {getattr(self, name)!r}\n" for name in _FIELDS)

    def to_csv(self) -> str:
        lines = ["frame,psnr,ssim"]
        lines.extend(f"{s.frame},{s.psnr!r},{s.ssim!r}" for s in self.per_frame)
        return "\n".join(lines) + "\n"


def parse_frame_scores(text: str) -> tuple[FrameScores, ...]:
    """Parse the CSV produced by EvalReport.to_csv."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0].strip() != "frame,psnr,ssim":
        raise SchemaError("expected header 'frame,psnr,ssim'", "per_frame")
    out = []
    for lineno, line in enumerate(lines[1:], 2):
        parts = line.split(",")
        if len(parts) != 3:
            raise SchemaError(f"line {lineno}: expected 3 columns", "per_frame")
        try:
            out.append(
                FrameScores(
                    frame=int(parts[0]), psnr=float(parts[1]), ssim=float(parts[2])
                )
            )
        except ValueError:
            raise SchemaError(f"line {lineno}: bad number", "per_frame") from None
    return tuple(out)


def parse_report(text: str, per_frame: tuple[FrameScores, ...] = ()) -> EvalReport:
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SchemaError(f"line {lineno}: expected 'key = value'", "report")
        key, _, value = line.partition("=")
        try:
            values[key.strip()] = float(value.strip())
        except ValueError:
            raise SchemaError(f"line {lineno}: {value.strip()!r} is not a number", "report") from None
    missing = [name for name in _FIELDS if name not in values]
    if missing:
        raise SchemaError(f"missing report keys {missing}", "report")
    return EvalReport(
        **{name: values[name] for name in _FIELDS}, per_frame=per_frame
    )


def evaluate_sample(
    factual: TwinSequence,
    counterfactual: TwinSequence,
    video: Video,
    intervention: Intervention,
    background: tuple[int, int, int] = (0, 0, 0),
) -> EvalReport:
    """Full battery for one counterfactual sample.

    psnr/ssim compare each video frame against the twin's own
    deterministic render, so a deterministic-backend video scores the
    caps and an external backend's drift is measurable.
    """
    style = RenderStyle(
        background=background, width=video.width, height=video.height
    )
    reference = render_video(counterfactual, style, fps=video.fps)
    first = counterfactual.frame_range[0]
    per_frame = tuple(
        FrameScores(
            frame=first + i,
            psnr=psnr(video.frames[i], reference.frames[i]),
            ssim=ssim(video.frames[i], reference.frames[i]),
        )
        for i in range(len(video.frames))
    )
    return EvalReport(
        psnr_mean=float(sum(s.psnr for s in per_frame) / len(per_frame)),
        ssim_mean=float(sum(s.ssim for s in per_frame) / len(per_frame)),
        frame_coherence=frame_coherence(video),
        grounding_iou=grounding_iou(video, counterfactual, background),
        intervention_success=intervention_success(
            factual, video, intervention, background
        ),
        per_frame=per_frame,
    )
