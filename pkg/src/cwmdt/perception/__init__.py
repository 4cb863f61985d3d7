from .depth import OCCLUSION_RATIO, infer_depth_order
from .describe import (
    caption,
    direction_word,
    motion_phrase,
    scene_summary,
    spatial_summary,
)
from .perceive import perceive
from .segment import RegionMask, classify_category, segment
from .track import GATE, track

__all__ = [
    "GATE",
    "OCCLUSION_RATIO",
    "RegionMask",
    "caption",
    "classify_category",
    "direction_word",
    "infer_depth_order",
    "motion_phrase",
    "perceive",
    "scene_summary",
    "segment",
    "spatial_summary",
    "track",
]
