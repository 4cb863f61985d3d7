"""Velocity estimation from centroid traces."""

from __future__ import annotations

from ..errors import RangeError
from ..quantize import round4
from ..twin.model import TwinSequence

ESTIMATION_WINDOW = 3  # frame gaps


def estimate_element_motion(
    centroid_trace, first_frame: int, at_frame: int
) -> tuple[float, float]:
    """Mean of the last min(3, available) centroid gaps ending at at_frame.

    Computed telescopically ((c_t - c_{t-n}) / n) and quantized to the
    4-digit grid, so a constant-velocity trace returns its exact stored
    velocity. Fewer than 2 observations give (0, 0). A reflection inside
    the window skews the mean; that is the documented behavior (e.g. gaps
    +2, +2, -2 average to 2/3, stored as 0.6667).
    """
    gaps = min(ESTIMATION_WINDOW, at_frame - first_frame)
    if gaps <= 0:
        return (0.0, 0.0)
    i = at_frame - first_frame
    x1, y1 = centroid_trace[i]
    x0, y0 = centroid_trace[i - gaps]
    return (round4((x1 - x0) / gaps), round4((y1 - y0) / gaps))


def estimate_motion(source: TwinSequence, at_frame: int) -> dict[int, tuple[float, float]]:
    """Per-id velocity estimates for every element present at at_frame."""
    if not (source.frame_range[0] <= at_frame <= source.frame_range[1]):
        raise RangeError(
            f"frame {at_frame} outside twin range {source.frame_range}"
        )
    out: dict[int, tuple[float, float]] = {}
    for el in source.major_elements:
        if el.first_frame <= at_frame <= el.last_frame:
            out[el.id] = estimate_element_motion(
                el.centroid_trace, el.first_frame, at_frame
            )
    return out
