"""Twin-side rasterization against direct geometric membership tests."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cwmdt.errors import UnknownShape
from cwmdt.raster import block_origin, rasterize, shape_cells


def mask_cells(mask):
    return {(int(c), int(r)) for r, c in np.argwhere(mask.to_array())}


def rect_cells_oracle(x, y, w, h, grid_w, grid_h):
    """Half-open box membership of cell centers, no block arithmetic."""
    out = set()
    for row in range(grid_h):
        for col in range(grid_w):
            cx, cy = col + 0.5, row + 0.5
            if x - w / 2.0 <= cx < x + w / 2.0 and y - h / 2.0 <= cy < y + h / 2.0:
                out.add((col, row))
    return out


coords = st.floats(min_value=-4.0, max_value=20.0, allow_nan=False).map(
    lambda v: round(v, 4)
)
sizes = st.integers(min_value=1, max_value=9)


@settings(max_examples=200, deadline=None)
@given(x=coords, y=coords, w=sizes, h=sizes)
def test_rectangle_matches_the_box_oracle(x, y, w, h):
    mask = rasterize("rectangle", x, y, w, h, 16, 16)
    assert mask_cells(mask) == rect_cells_oracle(x, y, w, h, 16, 16)


def test_block_origin_is_the_first_cell_center_inside():
    assert block_origin(8.0, 4) == 6  # box [6, 10): centers 6.5..9.5
    assert block_origin(8.5, 4) == 6  # box [6.5, 10.5): center 6.5 is inside
    assert block_origin(8.6, 4) == 7
    assert block_origin(8.0, 3) == 6  # box [6.5, 9.5)
    assert block_origin(2.0, 4) == 0


def test_small_circles_fill_their_block():
    for d in (1, 2, 3):
        assert shape_cells("circle", d, d).all()
    assert shape_cells("circle", 4, 4).sum() == 12  # corners fall outside


def test_circle_patch_is_symmetric():
    for w, h in ((4, 4), (5, 5), (6, 8), (7, 3)):
        patch = shape_cells("circle", w, h)
        assert (patch == patch[::-1, :]).all()
        assert (patch == patch[:, ::-1]).all()
        assert patch.sum() <= w * h


@settings(max_examples=80, deadline=None)
@given(
    category=st.sampled_from(["rectangle", "circle"]),
    x=st.floats(min_value=5.0, max_value=11.0).map(lambda v: round(v, 4)),
    y=st.floats(min_value=5.0, max_value=11.0).map(lambda v: round(v, 4)),
    w=st.integers(min_value=2, max_value=8),
)
def test_unclipped_bbox_and_centroid(category, x, y, w):
    h = w if category == "circle" else w + 1
    mask = rasterize(category, x, y, w, h, 24, 24)
    _, _, bw, bh = mask.bbox()
    assert (bw, bh) == (w, h)
    cx, cy = mask.centroid()
    assert abs(cx - x) <= 0.5 and abs(cy - y) <= 0.5


@settings(max_examples=80, deadline=None)
@given(
    category=st.sampled_from(["rectangle", "circle"]),
    x=st.floats(min_value=4.0, max_value=12.0).map(lambda v: round(v, 4)),
    y=st.floats(min_value=4.0, max_value=12.0).map(lambda v: round(v, 4)),
    w=st.integers(min_value=2, max_value=7),
)
def test_rerasterizing_from_the_centroid_is_stable(category, x, y, w):
    mask = rasterize(category, x, y, w, w, 20, 20)
    cx, cy = mask.centroid()
    assert rasterize(category, cx, cy, w, w, 20, 20) == mask


def test_clipping_at_the_grid_edge():
    mask = rasterize("rectangle", 0.0, 8.0, 4, 4, 16, 16)
    assert mask_cells(mask) == rect_cells_oracle(0.0, 8.0, 4, 4, 16, 16)
    assert mask.area == 8  # half the block survives

    gone = rasterize("rectangle", -10.0, 8.0, 4, 4, 16, 16)
    assert gone.area == 0


def test_fractional_sizes_round_to_cells():
    a = rasterize("rectangle", 8.0, 8.0, 4.4, 3.6, 16, 16)
    b = rasterize("rectangle", 8.0, 8.0, 4, 4, 16, 16)
    assert a == b


def test_unknown_category_rejected():
    with pytest.raises(UnknownShape):
        rasterize("triangle", 8, 8, 4, 4, 16, 16)
