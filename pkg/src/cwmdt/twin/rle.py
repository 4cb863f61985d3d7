"""Run-length-encoded binary masks over a fixed frame grid.

Runs are (start offset, length) pairs over the row-major grid, kept in
ascending, non-overlapping order. The grid size travels with the mask so
a document fragment is decodable on its own.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SchemaError


@dataclass(frozen=True)
class Mask:
    width: int
    height: int
    runs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise SchemaError(f"mask grid {self.width}x{self.height} not positive")
        total = self.width * self.height
        prev_end = 0
        for start, length in self.runs:
            if length < 1:
                raise SchemaError(f"run ({start},{length}) has length < 1")
            if start < prev_end:
                raise SchemaError(f"run ({start},{length}) overlaps or out of order")
            if start + length > total:
                raise SchemaError(f"run ({start},{length}) exceeds grid size {total}")
            prev_end = start + length

    @property
    def area(self) -> int:
        return sum(length for _, length in self.runs)

    def to_array(self) -> np.ndarray:
        """(height, width) boolean array."""
        flat = np.zeros(self.width * self.height, dtype=bool)
        for start, length in self.runs:
            flat[start : start + length] = True
        return flat.reshape(self.height, self.width)

    @classmethod
    def from_array(cls, array: np.ndarray) -> "Mask":
        arr = np.asarray(array, dtype=bool)
        if arr.ndim != 2:
            raise SchemaError(f"mask array must be 2-d, got shape {arr.shape}")
        flat = arr.reshape(-1)
        # run starts/ends via boundary detection on the padded flat view
        padded = np.concatenate(([False], flat, [False]))
        edges = np.flatnonzero(padded[1:] != padded[:-1])
        starts, ends = edges[0::2], edges[1::2]
        runs = tuple((int(s), int(e - s)) for s, e in zip(starts, ends))
        return cls(width=arr.shape[1], height=arr.shape[0], runs=runs)

    def bbox(self) -> tuple[int, int, int, int]:
        """(x0, y0, w, h) of the tight bounding box; zeros when empty."""
        if not self.runs:
            return (0, 0, 0, 0)
        arr = self.to_array()
        ys, xs = np.nonzero(arr)
        x0, x1 = int(xs.min()), int(xs.max())
        y0, y1 = int(ys.min()), int(ys.max())
        return (x0, y0, x1 - x0 + 1, y1 - y0 + 1)

    def centroid(self) -> tuple[float, float]:
        """Mean of covered cell centers; (nan, nan) when empty."""
        if not self.runs:
            return (float("nan"), float("nan"))
        arr = self.to_array()
        ys, xs = np.nonzero(arr)
        return (float(xs.mean()) + 0.5, float(ys.mean()) + 0.5)


def mask_iou(a: Mask, b: Mask) -> float:
    """Intersection over union of two masks on the same grid."""
    if (a.width, a.height) != (b.width, b.height):
        return 0.0
    aa, bb = a.to_array(), b.to_array()
    inter = int(np.logical_and(aa, bb).sum())
    union = int(np.logical_or(aa, bb).sum())
    if union == 0:
        return 1.0
    return inter / union
