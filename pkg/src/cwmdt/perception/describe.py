"""Fixed text templates for captions and scene summaries.

All strings are pure functions of the twin data, so identical twins
always produce identical text.
"""

from __future__ import annotations

import math

from ..twin.condense import region_label
from ..twin.model import ObjectTrace

STATIC_SPEED = 0.1   # cells/frame; below this an object is "static"
DRIFT_SPEED = 0.75   # below this it "drifts", above it "moves"

_DIRECTIONS = (
    "right", "down-right", "down", "down-left",
    "left", "up-left", "up", "up-right",
)


def direction_word(dx: float, dy: float) -> str:
    """8-way compass word; y grows downward (screen coordinates)."""
    angle = math.atan2(dy, dx)
    slot = int(round(angle / (math.pi / 4))) % 8
    return _DIRECTIONS[slot]


def caption(attributes: str, cx: float, cy: float, grid_w: int, grid_h: int) -> str:
    return f"{attributes} at {region_label(cx, cy, grid_w, grid_h)}"


def motion_phrase(attributes: str, centroid_trace: list[tuple[float, float]]) -> str:
    if len(centroid_trace) < 2:
        return f"{attributes} static"
    x0, y0 = centroid_trace[0]
    x1, y1 = centroid_trace[-1]
    dx, dy = x1 - x0, y1 - y0
    speed = math.hypot(dx, dy) / (len(centroid_trace) - 1)
    if speed < STATIC_SPEED:
        return f"{attributes} static"
    word = "drifting" if speed < DRIFT_SPEED else "moving"
    return f"{attributes} {word} {direction_word(dx, dy)}"


def scene_summary(elements: list[ObjectTrace]) -> str:
    if not elements:
        return "empty scene"
    noun = "object" if len(elements) == 1 else "objects"
    listing = ", ".join(e.attributes for e in elements)
    return f"scene with {len(elements)} {noun}: {listing}"


def spatial_summary(elements: list[ObjectTrace]) -> str:
    if not elements:
        return "no motion"
    return "; ".join(
        motion_phrase(e.attributes, list(e.centroid_trace)) for e in elements
    )
