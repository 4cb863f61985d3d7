"""First-frame editing.

The edited frame is re-rendered from the edited records, but only inside
the union of the changed objects' factual and edited masks; every pixel
outside that union is copied from the original frame bit-exactly. A no-op
edit therefore returns the original frame unchanged.
"""

from __future__ import annotations

import numpy as np

from ..errors import DimensionMismatch
from ..video import Frame
from .render import RenderStyle, record_mask, render_frame


def _by_id(records) -> dict[int, object]:
    return {rec.id: rec for rec in records}


def edit_first_frame(
    original: Frame,
    factual_records,
    edited_records,
    style: RenderStyle = RenderStyle(),
) -> Frame:
    scale = style.scale
    if original.width % scale or original.height % scale:
        raise DimensionMismatch(
            f"frame {original.width}x{original.height} is not a multiple of scale {scale}"
        )
    width, height = original.width // scale, original.height // scale

    factual = _by_id(factual_records)
    edited = _by_id(edited_records)
    changed = {
        object_id
        for object_id in factual.keys() | edited.keys()
        if factual.get(object_id) != edited.get(object_id)
    }

    union = np.zeros((height, width), dtype=bool)
    for object_id in changed:
        for rec in (factual.get(object_id), edited.get(object_id)):
            if rec is not None:
                union |= record_mask(rec, width, height).to_array()

    rendered = render_frame(
        edited_records,
        RenderStyle(
            background=style.background,
            antialiasing=style.antialiasing,
            scale=scale,
            width=width,
            height=height,
        ),
    )
    if (rendered.width, rendered.height) != (original.width, original.height):
        raise DimensionMismatch(
            f"render grid {rendered.width}x{rendered.height} "
            f"vs original {original.width}x{original.height}"
        )
    union_px = np.repeat(np.repeat(union, scale, axis=0), scale, axis=1)
    out = original.to_array().copy()
    out[union_px] = rendered.to_array()[union_px]
    return Frame.from_array(out)
