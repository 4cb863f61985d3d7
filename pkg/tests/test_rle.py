import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cwmdt.errors import SchemaError
from cwmdt.twin.rle import Mask, mask_iou


def test_runs_must_be_sorted_and_disjoint():
    Mask(width=4, height=4, runs=((0, 2), (4, 1)))
    with pytest.raises(SchemaError):
        Mask(width=4, height=4, runs=((4, 1), (0, 2)))
    with pytest.raises(SchemaError):
        Mask(width=4, height=4, runs=((0, 3), (2, 1)))
    with pytest.raises(SchemaError):
        Mask(width=4, height=4, runs=((0, 0),))
    with pytest.raises(SchemaError):
        Mask(width=4, height=4, runs=((15, 2),))


@settings(max_examples=50)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_array_round_trip(w, h, seed):
    rng = np.random.default_rng(seed)
    arr = rng.random((h, w)) < 0.4
    mask = Mask.from_array(arr)
    assert np.array_equal(mask.to_array(), arr)
    assert mask.area == int(arr.sum())


def test_bbox_and_centroid():
    arr = np.zeros((6, 8), dtype=bool)
    arr[2:4, 3:6] = True  # 3x2 block at x 3..5, y 2..3
    mask = Mask.from_array(arr)
    assert mask.bbox() == (3, 2, 3, 2)
    # centroid of cell centers: x mean = 4.5, y mean = 3.0
    assert mask.centroid() == (4.5, 3.0)


def test_empty_mask():
    mask = Mask.from_array(np.zeros((4, 4), dtype=bool))
    assert mask.area == 0
    assert mask.runs == ()


def test_iou():
    a = Mask.from_array(np.array([[1, 1], [0, 0]], dtype=bool))
    b = Mask.from_array(np.array([[1, 0], [1, 0]], dtype=bool))
    assert mask_iou(a, a) == 1.0
    assert mask_iou(a, b) == pytest.approx(1.0 / 3.0)
    empty = Mask.from_array(np.zeros((2, 2), dtype=bool))
    assert mask_iou(empty, empty) == 1.0
    assert mask_iou(a, empty) == 0.0


@settings(max_examples=30)
@given(st.integers(1, 10), st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_iou_bounds_and_symmetry(w, h, seed):
    rng = np.random.default_rng(seed)
    a = Mask.from_array(rng.random((h, w)) < 0.5)
    b = Mask.from_array(rng.random((h, w)) < 0.5)
    assert 0.0 <= mask_iou(a, b) <= 1.0
    assert mask_iou(a, b) == mask_iou(b, a)
