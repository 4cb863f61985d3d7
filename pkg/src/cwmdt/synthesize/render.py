"""Deterministic twin-to-pixels rendering.

Painter's algorithm over the records of one frame: farthest first
(descending z), lower id on top within a layer. A record's stored mask
is painted verbatim when present; mask-less records (e.g. from expanded
condensed twins) are rasterized from their category and spatial tuple.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..colors import color_to_rgb
from ..errors import InvalidParam, UnknownColor
from ..raster import rasterize
from ..twin.model import ObjectRecord, TwinSequence, require_valid
from ..twin.rle import Mask
from ..video import Frame, Video


@dataclass(frozen=True)
class RenderStyle:
    background: tuple[int, int, int] = (0, 0, 0)
    antialiasing: str = "none"  # hard edges only
    scale: int = 1  # cells to pixels
    width: int | None = None  # fallback grid when no record carries a mask
    height: int | None = None

    def __post_init__(self) -> None:
        if self.scale < 1:
            raise InvalidParam(f"scale must be at least 1, got {self.scale}")
        if self.antialiasing != "none":
            raise InvalidParam("only antialiasing 'none' is supported")


def record_color(record: ObjectRecord) -> tuple[int, int, int]:
    """Fill color from the attributes text (leading color word or #rrggbb)."""
    head = record.attributes.split(" ", 1)[0] if record.attributes else ""
    if not head:
        raise UnknownColor(f"record {record.id} has no color in attributes")
    return color_to_rgb(head)


def record_mask(record: ObjectRecord, width: int, height: int) -> Mask:
    if record.mask is not None:
        return record.mask
    return rasterize(
        record.category,
        record.spatial.x,
        record.spatial.y,
        int(round(record.spatial.w)),
        int(round(record.spatial.h)),
        width,
        height,
    )


def _grid_for(records, style: RenderStyle) -> tuple[int, int]:
    for rec in records:
        if rec.mask is not None:
            return (rec.mask.width, rec.mask.height)
    if style.width is not None and style.height is not None:
        return (style.width, style.height)
    raise InvalidParam("no mask carries the grid size and style gives none")


def render_frame(records, style: RenderStyle = RenderStyle()) -> Frame:
    width, height = _grid_for(records, style)
    img = np.zeros((height, width, 3), dtype=np.uint8)
    img[:, :] = style.background
    order = sorted(records, key=lambda r: (-r.spatial.z, -r.id))
    for rec in order:
        img[record_mask(rec, width, height).to_array()] = record_color(rec)
    if style.scale > 1:
        img = np.repeat(np.repeat(img, style.scale, axis=0), style.scale, axis=1)
    return Frame.from_array(img)


def render_video(twin: TwinSequence, style: RenderStyle = RenderStyle(), fps: int = 24) -> Video:
    require_valid(twin)
    grid = twin.grid_size()
    if grid is not None:
        style = replace(style, width=grid[0], height=grid[1])
    first, last = twin.frame_range
    frames = [
        render_frame(twin.records_at(f), style) for f in range(first, last + 1)
    ]
    return Video(frames=tuple(frames), fps=fps)
