"""Twin-side shape rasterization.

Geometry contract (shared with the simulator's renderer, implemented
there independently): a cell (i, j) has center (i+0.5, j+0.5). An object
with centroid (x, y) and integer size (w, h) occupies the block of cells
whose centers fall in the half-open box [x-w/2, x+w/2) x [y-h/2, y+h/2).
Rectangles fill the block; circles keep the block cells inside the
inscribed ellipse measured from the block center.

The rule is perception-stable: the rasterized pattern is symmetric about
the block center, so re-rasterizing from the perceived centroid and
bounding box reproduces the identical cell set.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import UnknownShape
from .twin.rle import Mask

CATEGORIES = ("rectangle", "circle")


def block_origin(center: float, size: int) -> int:
    """Index of the first cell whose center is >= center - size/2."""
    return math.ceil(center - size / 2.0 - 0.5)


def shape_cells(category: str, w: int, h: int) -> np.ndarray:
    """Boolean (h, w) patch of occupied cells for the object's block."""
    if category == "rectangle":
        return np.ones((h, w), dtype=bool)
    if category == "circle":
        # offsets of cell centers from the block center, in cells
        dx = np.arange(w) - (w - 1) / 2.0
        dy = np.arange(h) - (h - 1) / 2.0
        ex = (dx / (w / 2.0)) ** 2
        ey = (dy / (h / 2.0)) ** 2
        return (ey[:, None] + ex[None, :]) <= 1.0
    raise UnknownShape(f"unknown category {category!r}")


def rasterize(
    category: str,
    x: float,
    y: float,
    w: float,
    h: float,
    grid_w: int,
    grid_h: int,
) -> Mask:
    """Mask of the object on the grid; off-grid cells are clipped."""
    iw, ih = int(round(w)), int(round(h))
    i0 = block_origin(x, iw)
    j0 = block_origin(y, ih)
    patch = shape_cells(category, iw, ih)
    arr = np.zeros((grid_h, grid_w), dtype=bool)
    si0, sj0 = max(0, -i0), max(0, -j0)
    di0, dj0 = max(0, i0), max(0, j0)
    si1 = iw - max(0, i0 + iw - grid_w)
    sj1 = ih - max(0, j0 + ih - grid_h)
    if si1 > si0 and sj1 > sj0:
        arr[dj0 : dj0 + (sj1 - sj0), di0 : di0 + (si1 - si0)] = patch[sj0:sj1, si0:si1]
    return Mask.from_array(arr)
