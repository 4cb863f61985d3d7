"""Occlusion-based depth ranking.

2D renders carry no photometric depth cue, so depth comes from occlusion
evidence alone: a region whose visible area dropped below 90% of its
historical maximum, and which borders another region, is ranked behind
every region it borders. Everything else keeps its carried depth.
"""

from __future__ import annotations

import numpy as np

from .segment import RegionMask

OCCLUSION_RATIO = 0.9


def _adjacent(a: np.ndarray, b: np.ndarray) -> bool:
    # 4-neighbor adjacency between two cell sets
    if not a.any() or not b.any():
        return False
    grown = np.zeros_like(a)
    grown[1:, :] |= a[:-1, :]
    grown[:-1, :] |= a[1:, :]
    grown[:, 1:] |= a[:, :-1]
    grown[:, :-1] |= a[:, 1:]
    return bool((grown & b).any())


def infer_depth_order(
    regions: list[RegionMask],
    expected_areas: list[int],
    prior_depths: list[float] | None = None,
) -> list[float]:
    """Per-region z estimates (larger = farther).

    expected_areas holds each region's historical maximum visible area
    (at least the current area); prior_depths carries z from history,
    defaulting to 0. Occluded regions are processed least-occluded first
    so stacked occlusion chains resolve to increasing depth.
    """
    n = len(regions)
    depths = list(prior_depths) if prior_depths is not None else [0.0] * n
    if n != len(expected_areas) or n != len(depths):
        raise ValueError("regions, expected_areas, prior_depths must align")
    if n == 0:
        return []

    arrays = [r.mask.to_array() for r in regions]
    ratios = [regions[i].area / max(expected_areas[i], 1) for i in range(n)]
    occluded = [i for i in range(n) if ratios[i] < OCCLUSION_RATIO]
    occluded.sort(key=lambda i: (-ratios[i], i))
    for i in occluded:
        behind = [
            depths[j] + 1.0
            for j in range(n)
            if j != i and _adjacent(arrays[i], arrays[j])
        ]
        if behind:
            depths[i] = max(depths[i], max(behind))
    return depths
