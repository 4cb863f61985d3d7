"""Reference twins built straight from simulator states.

Unlike perception (which sees only rendered pixels), this builder reads
the simulator's exact positions, sizes, and depth layers, giving twins
whose centroid traces carry the true continuous coordinates. These are
the source documents for twin-level propagation checks against the
simulator, and a debugging aid exposed by the simulate CLI.
"""

from __future__ import annotations

import numpy as np

from ..perception.describe import caption, scene_summary, spatial_summary
from ..twin.model import TwinSequence, build_element, build_twin, make_record, require_valid
from ..twin.rle import Mask
from .render import object_cells
from .world import SimObject, WorldState


def _object_mask(obj: SimObject, width: int, height: int) -> Mask:
    grid = np.zeros((height, width), dtype=bool)
    for col, row in object_cells(obj):
        if 0 <= col < width and 0 <= row < height:
            grid[row, col] = True
    return Mask.from_array(grid)


def groundtruth_twin(states: list[WorldState]) -> TwinSequence:
    """Twin covering the given consecutive states, masks included.

    Masks are the full (unoccluded) object cells; records store the true
    positions, so no quantization error separates this twin from the
    simulator beyond the shared 4-digit grid.
    """
    if not states:
        raise ValueError("at least one state required")
    width, height = states[0].width, states[0].height
    first = states[0].frame_index

    per_id: dict[int, dict] = {}
    for offset, state in enumerate(states):
        if state.frame_index != first + offset:
            raise ValueError("states must be consecutive frames")
        for obj in state.objects:
            entry = per_id.setdefault(
                obj.id,
                {
                    "category": obj.shape,
                    "attributes": f"{obj.color} {obj.shape}",
                    "records": [],
                    "captions": [],
                },
            )
            mask = _object_mask(obj, width, height)
            entry["records"].append(
                make_record(
                    obj.id,
                    entry["category"],
                    entry["attributes"],
                    state.frame_index,
                    x=obj.position[0],
                    y=obj.position[1],
                    z=float(obj.depth_layer),
                    w=obj.size[0],
                    h=obj.size[1],
                    mask=mask,
                )
            )
            entry["captions"].append(
                caption(entry["attributes"], obj.position[0], obj.position[1], width, height)
            )

    elements = [
        build_element(object_id, e["category"], e["attributes"], e["records"], e["captions"])
        for object_id, e in sorted(per_id.items())
    ]
    twin = build_twin(
        scene_summary(elements),
        spatial_summary(elements),
        (first, states[-1].frame_index),
        elements,
    )
    return require_valid(twin)
