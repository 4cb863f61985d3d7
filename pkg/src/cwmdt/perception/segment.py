"""Color-keyed segmentation of rendered frames.

Each object carries a scene-unique color, so segmentation reduces to
finding 4-connected components of identical non-background color. The
interface mirrors what a learned segmenter would emit: per-region masks
with centroid, area, and bounding box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..raster import shape_cells
from ..twin.rle import Mask
from ..video import Frame


@dataclass(frozen=True)
class RegionMask:
    color: tuple[int, int, int]
    mask: Mask
    centroid: tuple[float, float]
    area: int
    bbox: tuple[int, int, int, int]  # (x0, y0, w, h)


def segment(frame: Frame, background: tuple[int, int, int] = (0, 0, 0)) -> list[RegionMask]:
    """Regions sorted by (color, x0, y0); blank frames give []."""
    arr = frame.to_array()
    flat = arr.reshape(-1, 3).astype(np.uint32)
    # pack to one word per pixel; big-endian packing keeps (r, g, b) sort order
    packed = (flat[:, 0] << 16) | (flat[:, 1] << 8) | flat[:, 2]
    grid = packed.reshape(arr.shape[0], arr.shape[1])
    regions = []
    for value in np.unique(packed):
        rgb = (int(value >> 16) & 255, int(value >> 8) & 255, int(value) & 255)
        if rgb == tuple(background):
            continue
        binary = grid == value
        labeled, count = ndimage.label(binary)  # default structure: 4-connectivity
        for index in range(1, count + 1):
            mask = Mask.from_array(labeled == index)
            regions.append(
                RegionMask(
                    color=rgb,
                    mask=mask,
                    centroid=mask.centroid(),
                    area=mask.area,
                    bbox=mask.bbox(),
                )
            )
    regions.sort(key=lambda r: (r.color, r.bbox[0], r.bbox[1]))
    return regions


def classify_category(region: RegionMask) -> str:
    """Shape from the visible cell pattern: exact match first, fill ratio after.

    A partially occluded object can land on the wrong side of the ratio;
    callers keep the first sighting's label for stability.
    """
    x0, y0, w, h = region.bbox
    grid = region.mask.to_array()[y0:y0 + h, x0:x0 + w]
    if region.area == w * h:
        return "rectangle"
    if np.array_equal(grid, shape_cells("circle", w, h)):
        return "circle"
    return "circle" if region.area < 0.9 * w * h else "rectangle"
