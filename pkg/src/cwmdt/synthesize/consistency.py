"""Visual-textual agreement between a frame and its records.

The frame is segmented and each observed region is assigned to the
record whose expected visible support (painter ownership under the
records' depth order) it overlaps most. The score is

    sum of per-record IoU(assigned regions, expected visible cells)
    -----------------------------------------------------------------
    visible record count + unassigned region count

so a region with no record to explain it, or a record with no pixels
backing it, both pull the score down. A blank frame against empty
records is vacuous agreement, 1.0. Records wholly hidden behind others
are skipped (they are not expected to be visible).
"""

from __future__ import annotations

import numpy as np

from ..perception.segment import segment
from ..video import Frame
from .render import record_mask


def check_consistency(
    frame: Frame, records, background: tuple[int, int, int] = (0, 0, 0)
) -> float:
    width, height = frame.width, frame.height

    owner = np.full((height, width), -1, dtype=np.int64)
    order = sorted(records, key=lambda r: (-r.spatial.z, -r.id))
    for rec in order:
        owner[record_mask(rec, width, height).to_array()] = rec.id
    expected = {
        rec.id: owner == rec.id
        for rec in records
        if bool((owner == rec.id).any())
    }

    regions = segment(frame, background)
    if not expected:
        return 1.0 if not regions else 0.0

    assigned: dict[int, np.ndarray] = {}
    unassigned = 0
    for region in regions:
        cells = region.mask.to_array()
        best_id, best_overlap = None, 0
        for object_id in sorted(expected):
            overlap = int((cells & expected[object_id]).sum())
            if overlap > best_overlap:
                best_id, best_overlap = object_id, overlap
        if best_id is None:
            unassigned += 1
            continue
        if best_id in assigned:
            assigned[best_id] = assigned[best_id] | cells
        else:
            assigned[best_id] = cells

    total = 0.0
    for object_id, want in expected.items():
        got = assigned.get(object_id)
        if got is None:
            continue
        union = int((want | got).sum())
        inter = int((want & got).sum())
        total += inter / union if union else 0.0
    return total / (len(expected) + unassigned)
