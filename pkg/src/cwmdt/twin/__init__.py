"""Digital twin core: data model, canonical codec, condensation, diff."""

from .codec import parse_twin, serialize_twin, TWIN_VERSION
from .condense import (
    CondensedElement,
    CondensedTwin,
    condense,
    condensed_to_obj,
    expand,
    parse_condensed,
    parse_condensed_obj,
    rdp_keypoints,
    region_label,
    serialize_condensed,
    DEFAULT_EPSILON,
)
from .diff import Change, TwinDiff, diff_twins
from .model import (
    ObjectRecord,
    ObjectTrace,
    SpatialProps,
    TwinSequence,
    Violation,
    build_element,
    build_twin,
    make_record,
    require_valid,
    validate,
)
from .rle import Mask, mask_iou

__all__ = [
    "Change",
    "CondensedElement",
    "CondensedTwin",
    "DEFAULT_EPSILON",
    "Mask",
    "ObjectRecord",
    "ObjectTrace",
    "SpatialProps",
    "TwinDiff",
    "TwinSequence",
    "TWIN_VERSION",
    "Violation",
    "build_element",
    "build_twin",
    "condense",
    "condensed_to_obj",
    "diff_twins",
    "expand",
    "make_record",
    "mask_iou",
    "parse_condensed",
    "parse_condensed_obj",
    "parse_twin",
    "rdp_keypoints",
    "region_label",
    "require_valid",
    "serialize_condensed",
    "serialize_twin",
    "validate",
]
