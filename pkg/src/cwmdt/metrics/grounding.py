"""Localization agreement between a twin and a video.

For every (frame, object) pair the twin claims, the best IoU against the
perceived regions whose color and classified shape match the record; a
pair with no matching region contributes 0. The mean over all pairs is
the grounding score; a twin with no records is vacuous agreement, 1.0.
"""

from __future__ import annotations

from ..errors import RangeMismatch
from ..perception.segment import classify_category, segment
from ..synthesize.render import record_color, record_mask
from ..twin.model import TwinSequence
from ..twin.rle import mask_iou
from ..video import Video


def grounding_iou(
    video: Video, twin: TwinSequence, background: tuple[int, int, int] = (0, 0, 0)
) -> float:
    first, last = twin.frame_range
    if last - first + 1 != len(video.frames):
        raise RangeMismatch(
            f"twin spans {last - first + 1} frames, video has {len(video.frames)}"
        )
    total = 0.0
    pairs = 0
    for offset, frame in enumerate(video.frames):
        records = twin.records_at(first + offset)
        if not records:
            continue
        regions = segment(frame, background)
        for rec in records:
            pairs += 1
            color = record_color(rec)
            best = 0.0
            for region in regions:
                if region.color != color:
                    continue
                if classify_category(region) != rec.category:
                    continue
                iou = mask_iou(
                    record_mask(rec, frame.width, frame.height), region.mask
                )
                best = max(best, iou)
            total += best
    if pairs == 0:
        return 1.0
    return total / pairs
