"""Canonical twin document text codec.

The serialized form is JSON with a fixed key order, no insignificant
whitespace, and floats printed with exactly 4 fractional digits
(half-even). parse and serialize are exact inverses on valid documents:
serialize(parse(doc)) reproduces doc byte for byte, and parse(serialize(t))
equals t because twin constructors quantize to the same grid.
"""

from __future__ import annotations

import json

from ..errors import SchemaError, TwinSyntaxError
from ..quantize import fmt4
from .model import (
    ObjectTrace,
    TwinSequence,
    make_record,
    require_valid,
)
from .rle import Mask

TWIN_VERSION = "1"

_TOP_KEYS = ["twin_version", "summary", "spatial_summary", "frame_range", "major_elements"]
_ELEMENT_KEYS = [
    "id",
    "category",
    "attributes",
    "frame_captions",
    "area_trace",
    "depth_trace",
    "centroid_trace",
    "records",
]
_RECORD_KEYS = ["frame", "x", "y", "z", "w", "h", "mask"]
_MASK_KEYS = ["size", "runs"]


def _s(text: str) -> str:
    return json.dumps(text, ensure_ascii=True)


def _serialize_mask(mask: Mask | None) -> str:
    if mask is None:
        return "null"
    runs = ",".join(f"[{start},{length}]" for start, length in mask.runs)
    return f'{{"size":[{mask.width},{mask.height}],"runs":[{runs}]}}'


def _serialize_record(rec) -> str:
    sp = rec.spatial
    return (
        f'{{"frame":{rec.frame},"x":{fmt4(sp.x)},"y":{fmt4(sp.y)},"z":{fmt4(sp.z)},'
        f'"w":{fmt4(sp.w)},"h":{fmt4(sp.h)},"mask":{_serialize_mask(rec.mask)}}}'
    )


def _serialize_element(el: ObjectTrace) -> str:
    captions = ",".join(_s(c) for c in el.frame_captions)
    areas = ",".join(str(int(a)) for a in el.area_trace)
    depths = ",".join(fmt4(d) for d in el.depth_trace)
    centroids = ",".join(f"[{fmt4(x)},{fmt4(y)}]" for x, y in el.centroid_trace)
    records = ",".join(_serialize_record(r) for r in el.records)
    return (
        f'{{"id":{el.id},"category":{_s(el.category)},"attributes":{_s(el.attributes)},'
        f'"frame_captions":[{captions}],"area_trace":[{areas}],"depth_trace":[{depths}],'
        f'"centroid_trace":[{centroids}],"records":[{records}]}}'
    )


def serialize_twin(twin: TwinSequence) -> str:
    """Canonical text for a valid twin; deterministic byte for byte."""
    require_valid(twin)
    elements = ",".join(_serialize_element(el) for el in twin.major_elements)
    first, last = twin.frame_range
    return (
        f'{{"twin_version":{_s(TWIN_VERSION)},"summary":{_s(twin.summary)},'
        f'"spatial_summary":{_s(twin.spatial_summary)},"frame_range":[{first},{last}],'
        f'"major_elements":[{elements}]}}'
    )


# --- parsing ---

def _expect_keys(obj: dict, keys: list[str], path: str) -> None:
    if not isinstance(obj, dict):
        raise SchemaError(f"expected object, got {type(obj).__name__}", path)
    missing = [k for k in keys if k not in obj]
    extra = [k for k in obj if k not in keys]
    if missing:
        raise SchemaError(f"missing keys {missing}", path)
    if extra:
        raise SchemaError(f"unexpected keys {extra}", path)


def _as_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"expected integer, got {value!r}", path)
    return value


def _as_float(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"expected number, got {value!r}", path)
    return float(value)


def _as_str(value, path: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(f"expected string, got {value!r}", path)
    return value


def _as_list(value, path: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(f"expected array, got {value!r}", path)
    return value


def _parse_mask(obj, path: str) -> Mask | None:
    if obj is None:
        return None
    _expect_keys(obj, _MASK_KEYS, path)
    size = _as_list(obj["size"], f"{path}.size")
    if len(size) != 2:
        raise SchemaError("size must be [width, height]", f"{path}.size")
    width = _as_int(size[0], f"{path}.size[0]")
    height = _as_int(size[1], f"{path}.size[1]")
    runs = []
    for i, run in enumerate(_as_list(obj["runs"], f"{path}.runs")):
        run = _as_list(run, f"{path}.runs[{i}]")
        if len(run) != 2:
            raise SchemaError("run must be [start, length]", f"{path}.runs[{i}]")
        runs.append(
            (_as_int(run[0], f"{path}.runs[{i}][0]"), _as_int(run[1], f"{path}.runs[{i}][1]"))
        )
    try:
        return Mask(width=width, height=height, runs=tuple(runs))
    except SchemaError as exc:
        raise SchemaError(str(exc), path) from None


def _parse_element(obj, path: str) -> ObjectTrace:
    _expect_keys(obj, _ELEMENT_KEYS, path)
    object_id = _as_int(obj["id"], f"{path}.id")
    category = _as_str(obj["category"], f"{path}.category")
    attributes = _as_str(obj["attributes"], f"{path}.attributes")
    captions = tuple(
        _as_str(c, f"{path}.frame_captions[{i}]")
        for i, c in enumerate(_as_list(obj["frame_captions"], f"{path}.frame_captions"))
    )
    areas = tuple(
        _as_int(a, f"{path}.area_trace[{i}]")
        for i, a in enumerate(_as_list(obj["area_trace"], f"{path}.area_trace"))
    )
    depths = tuple(
        _as_float(d, f"{path}.depth_trace[{i}]")
        for i, d in enumerate(_as_list(obj["depth_trace"], f"{path}.depth_trace"))
    )
    centroids = []
    for i, pair in enumerate(_as_list(obj["centroid_trace"], f"{path}.centroid_trace")):
        pair = _as_list(pair, f"{path}.centroid_trace[{i}]")
        if len(pair) != 2:
            raise SchemaError("centroid must be [x, y]", f"{path}.centroid_trace[{i}]")
        centroids.append(
            (
                _as_float(pair[0], f"{path}.centroid_trace[{i}][0]"),
                _as_float(pair[1], f"{path}.centroid_trace[{i}][1]"),
            )
        )
    records = []
    for i, robj in enumerate(_as_list(obj["records"], f"{path}.records")):
        rpath = f"{path}.records[{i}]"
        _expect_keys(robj, _RECORD_KEYS, rpath)
        records.append(
            make_record(
                object_id=object_id,
                category=category,
                attributes=attributes,
                frame=_as_int(robj["frame"], f"{rpath}.frame"),
                x=_as_float(robj["x"], f"{rpath}.x"),
                y=_as_float(robj["y"], f"{rpath}.y"),
                z=_as_float(robj["z"], f"{rpath}.z"),
                w=_as_float(robj["w"], f"{rpath}.w"),
                h=_as_float(robj["h"], f"{rpath}.h"),
                mask=_parse_mask(robj["mask"], f"{rpath}.mask"),
            )
        )
    return ObjectTrace(
        id=object_id,
        category=category,
        attributes=attributes,
        frame_captions=captions,
        area_trace=areas,
        depth_trace=depths,
        centroid_trace=tuple(centroids),
        records=tuple(records),
    )


def parse_twin(text: str) -> TwinSequence:
    """Parse canonical (or equivalent) twin text; total over documented errors."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TwinSyntaxError(f"malformed document: {exc}") from None
    _expect_keys(doc, _TOP_KEYS, "$")
    version = _as_str(doc["twin_version"], "$.twin_version")
    if version != TWIN_VERSION:
        raise SchemaError(f"unsupported twin_version {version!r}", "$.twin_version")
    summary = _as_str(doc["summary"], "$.summary")
    spatial_summary = _as_str(doc["spatial_summary"], "$.spatial_summary")
    frange = _as_list(doc["frame_range"], "$.frame_range")
    if len(frange) != 2:
        raise SchemaError("frame_range must be [first, last]", "$.frame_range")
    first = _as_int(frange[0], "$.frame_range[0]")
    last = _as_int(frange[1], "$.frame_range[1]")
    elements = [
        _parse_element(e, f"$.major_elements[{i}]")
        for i, e in enumerate(_as_list(doc["major_elements"], "$.major_elements"))
    ]
    # construct directly (no reordering) so out-of-order ids surface as
    # an ID_ORDER invariant violation instead of being silently fixed
    twin = TwinSequence(
        summary=summary,
        spatial_summary=spatial_summary,
        frame_range=(first, last),
        major_elements=tuple(elements),
    )
    return require_valid(twin)
