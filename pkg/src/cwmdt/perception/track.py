"""Greedy nearest-centroid tracking across consecutive frames."""

from __future__ import annotations

import math

from ..twin.model import ObjectRecord
from .segment import RegionMask

GATE = 8.0  # max centroid displacement (cells) for a match


def track(
    previous: list[ObjectRecord],
    regions: list[RegionMask],
    next_id: int | None = None,
) -> list[int]:
    """Assign ids to regions; returns one id per region, aligned by index.

    Matching is greedy in ascending centroid distance, gated at GATE cells;
    ties prefer the lower region index, then the lower previous id. Unmatched
    regions get fresh ids counting up from next_id (callers pass the
    sequence-wide maximum so a departed id is never reissued; defaults to
    max previous id + 1). Unmatched previous ids are departed by omission.
    """
    pairs = []
    for ri, region in enumerate(regions):
        cx, cy = region.centroid
        for prev in previous:
            dist = math.hypot(cx - prev.spatial.x, cy - prev.spatial.y)
            if dist <= GATE:
                pairs.append((dist, ri, prev.id))
    pairs.sort()

    assigned: dict[int, int] = {}
    used_prev: set[int] = set()
    for dist, ri, pid in pairs:
        if ri in assigned or pid in used_prev:
            continue
        assigned[ri] = pid
        used_prev.add(pid)

    if next_id is None:
        next_id = max((p.id for p in previous), default=-1) + 1
    fresh = next_id
    ids = []
    for ri in range(len(regions)):
        if ri in assigned:
            ids.append(assigned[ri])
        else:
            ids.append(fresh)
            fresh += 1
    return ids
