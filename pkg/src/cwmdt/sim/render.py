"""Ground-truth renderer for simulator states.

Kept separate from the twin-side rasterizer on purpose: both follow the
same documented geometry contract (cell (i, j) covers [i, i+1) x [j, j+1)
with center (i+0.5, j+0.5); a w x h block starts at ceil(c - extent/2 - 0.5)
per axis; circles keep block cells whose center lies inside the inscribed
ellipse), but the implementations share no code so one can check the other.
"""

from __future__ import annotations

import math

import numpy as np

from ..colors import color_to_rgb
from ..video import Frame, Video
from .world import SimObject, WorldState

BACKGROUND = (0, 0, 0)


def object_cells(obj: SimObject) -> list[tuple[int, int]]:
    """Grid cells covered by the object, unclipped, (col, row) pairs."""
    w, h = obj.size
    cx, cy = obj.position
    i0 = math.ceil(cx - w / 2.0 - 0.5)
    j0 = math.ceil(cy - h / 2.0 - 0.5)
    cells = []
    for dj in range(h):
        for di in range(w):
            if obj.shape == "circle":
                # offsets of the cell center from the block center
                ox = di - (w - 1) / 2.0
                oy = dj - (h - 1) / 2.0
                if (ox / (w / 2.0)) ** 2 + (oy / (h / 2.0)) ** 2 > 1.0:
                    continue
            cells.append((i0 + di, j0 + dj))
    return cells


def render_state(state: WorldState) -> Frame:
    """Paint objects far-to-near; within a layer the lower id wins."""
    img = np.zeros((state.height, state.width, 3), dtype=np.uint8)
    img[:, :] = BACKGROUND
    order = sorted(state.objects, key=lambda o: (-o.depth_layer, -o.id))
    for obj in order:
        rgb = color_to_rgb(obj.color)
        for col, row in object_cells(obj):
            if 0 <= col < state.width and 0 <= row < state.height:
                img[row, col] = rgb
    return Frame.from_array(img)


def render_states(states: list[WorldState], fps: int = 24) -> Video:
    return Video(frames=tuple(render_state(s) for s in states), fps=fps)


def visible_mask(state: WorldState, target_id: int) -> np.ndarray:
    """Boolean grid of cells where the target is frontmost."""
    owner = np.full((state.height, state.width), -1, dtype=np.int64)
    order = sorted(state.objects, key=lambda o: (-o.depth_layer, -o.id))
    for obj in order:
        for col, row in object_cells(obj):
            if 0 <= col < state.width and 0 <= row < state.height:
                owner[row, col] = obj.id
    return owner == target_id
