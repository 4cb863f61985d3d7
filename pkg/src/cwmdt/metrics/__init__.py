from .grounding import grounding_iou
from .quality import PSNR_CAP, frame_coherence, psnr, ssim
from .report import (
    EvalReport,
    FrameScores,
    evaluate_sample,
    parse_frame_scores,
    parse_report,
)
from .success import intervention_success

__all__ = [
    "EvalReport",
    "FrameScores",
    "PSNR_CAP",
    "evaluate_sample",
    "frame_coherence",
    "grounding_iou",
    "intervention_success",
    "parse_frame_scores",
    "parse_report",
    "psnr",
    "ssim",
]
