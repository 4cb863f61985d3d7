"""Condensed twin form: keypoint traces instead of per-frame records.

Condensation keeps exactly what a language model needs to reason about a
scene: identity and attributes verbatim, coarse region visits, motion as
Ramer-Douglas-Peucker keypoints of the centroid trace, and exact
depth/area spans. expand is the inverse used to rebuild a frame-indexed
twin by per-segment linear interpolation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..errors import RangeError, SchemaError, TwinSyntaxError
from ..quantize import fmt4, round4
from .model import ObjectTrace, TwinSequence, build_element, build_twin, make_record

DEFAULT_EPSILON = 0.5

REGION_ROWS = ("top", "middle", "bottom")
REGION_COLS = ("left", "center", "right")


def region_label(x: float, y: float, width: int, height: int) -> str:
    """3x3 coarse grid label for a point, e.g. 'top-left'."""
    col = min(2, max(0, int(3 * x / width)))
    row = min(2, max(0, int(3 * y / height)))
    return f"{REGION_ROWS[row]}-{REGION_COLS[col]}"


@dataclass(frozen=True)
class CondensedElement:
    id: int
    category: str
    attributes: str
    region_labels: tuple[str, ...]
    motion_keypoints: tuple[tuple[int, float, float], ...]  # (frame, x, y)
    depth_span: tuple[float, float]
    area_span: tuple[int, int]


@dataclass(frozen=True)
class CondensedTwin:
    summary: str
    spatial_summary: str
    elements: tuple[CondensedElement, ...]


# --- keypoint selection ---

def _deviation(points, frames, i, a, b) -> float:
    """Distance from point i to the linear-in-frame chord between a and b."""
    fa, fb = frames[a], frames[b]
    xa, ya = points[a]
    xb, yb = points[b]
    if fb == fa:
        t = 0.0
    else:
        t = (frames[i] - fa) / (fb - fa)
    lx = xa + t * (xb - xa)
    ly = ya + t * (yb - ya)
    dx = points[i][0] - lx
    dy = points[i][1] - ly
    return (dx * dx + dy * dy) ** 0.5


def rdp_keypoints(
    points: list[tuple[float, float]] | tuple[tuple[float, float], ...],
    frames: list[int] | tuple[int, ...],
    epsilon: float,
) -> list[int]:
    """Indices kept by RDP simplification under time-parameterized deviation.

    The deviation of an interior sample is measured against the linear
    interpolation over frame index between the candidate endpoints, which
    is exactly what expand uses to reconstruct, so the fidelity bound is
    tight by construction. Endpoints are always retained.
    """
    n = len(points)
    if n <= 1:
        return list(range(n))
    keep = [0, n - 1]
    stack = [(0, n - 1)]
    while stack:
        a, b = stack.pop()
        worst, worst_i = 0.0, -1
        for i in range(a + 1, b):
            d = _deviation(points, frames, i, a, b)
            if d > worst:
                worst, worst_i = d, i
        if worst > epsilon and worst_i >= 0:
            keep.append(worst_i)
            stack.append((a, worst_i))
            stack.append((worst_i, b))
    return sorted(set(keep))


def _condense_element(el: ObjectTrace, epsilon: float, grid: tuple[int, int]) -> CondensedElement:
    frames = [r.frame for r in el.records]
    keep = rdp_keypoints(el.centroid_trace, frames, epsilon)
    keypoints = tuple(
        (frames[i], el.centroid_trace[i][0], el.centroid_trace[i][1]) for i in keep
    )
    labels: list[str] = []
    for (x, y) in el.centroid_trace:
        label = region_label(x, y, grid[0], grid[1])
        if label not in labels:
            labels.append(label)
    return CondensedElement(
        id=el.id,
        category=el.category,
        attributes=el.attributes,
        region_labels=tuple(labels),
        motion_keypoints=keypoints,
        depth_span=(min(el.depth_trace), max(el.depth_trace)),
        area_span=(min(el.area_trace), max(el.area_trace)),
    )


def condense(twin: TwinSequence, epsilon: float = DEFAULT_EPSILON) -> CondensedTwin:
    if epsilon < 0:
        raise RangeError(f"epsilon must be non-negative, got {epsilon}")
    grid = twin.grid_size() or (64, 64)
    return CondensedTwin(
        summary=twin.summary,
        spatial_summary=twin.spatial_summary,
        elements=tuple(_condense_element(el, epsilon, grid) for el in twin.major_elements),
    )


# --- expansion ---

def _interp_trace(
    keypoints: tuple[tuple[int, float, float], ...]
) -> list[tuple[int, float, float]]:
    out: list[tuple[int, float, float]] = []
    for (f0, x0, y0), (f1, x1, y1) in zip(keypoints, keypoints[1:]):
        span = f1 - f0
        for f in range(f0, f1):
            t = (f - f0) / span
            out.append((f, x0 + t * (x1 - x0), y0 + t * (y1 - y0)))
    last = keypoints[-1]
    out.append(last)
    return out


def expand(condensed: CondensedTwin, frame_range: tuple[int, int]) -> TwinSequence:
    """Rebuild a frame-indexed twin from keypoints by linear interpolation.

    Records carry no masks (the condensed form stores no sizes); spatial
    w/h come from the area span and z from the depth span midpoint.
    """
    first, last = frame_range
    if first > last:
        raise RangeError(f"frame_range {frame_range} is inverted")
    elements = []
    for el in condensed.elements:
        if not el.motion_keypoints:
            raise RangeError(f"element {el.id} has no motion keypoints")
        kf = [k[0] for k in el.motion_keypoints]
        if any(b <= a for a, b in zip(kf, kf[1:])):
            raise RangeError(f"element {el.id} keypoint frames not ascending")
        if kf[0] < first or kf[-1] > last:
            raise RangeError(
                f"element {el.id} keypoints span [{kf[0]}, {kf[-1]}] "
                f"outside frame_range {frame_range}"
            )
        side = max(1, round((el.area_span[0] * el.area_span[1]) ** 0.25))
        depth = round4((el.depth_span[0] + el.depth_span[1]) / 2.0)
        area = int(round((el.area_span[0] + el.area_span[1]) / 2.0))
        records = []
        captions = []
        for frame, x, y in _interp_trace(el.motion_keypoints):
            records.append(
                make_record(
                    object_id=el.id,
                    category=el.category,
                    attributes=el.attributes,
                    frame=frame,
                    x=x,
                    y=y,
                    z=depth,
                    w=side,
                    h=side,
                    mask=None,
                )
            )
            captions.append(f"{el.attributes} at expanded position")
        built = build_element(el.id, el.category, el.attributes, records, captions)
        # area trace from the span midpoint; mask-less so no coherence check
        built = ObjectTrace(
            id=built.id,
            category=built.category,
            attributes=built.attributes,
            frame_captions=built.frame_captions,
            area_trace=tuple(area for _ in built.records),
            depth_trace=built.depth_trace,
            centroid_trace=built.centroid_trace,
            records=built.records,
        )
        elements.append(built)
    return build_twin(condensed.summary, condensed.spatial_summary, frame_range, elements)


# --- condensed document codec ---

_CONDENSED_TOP = ["summary", "spatial_summary", "elements"]
_CONDENSED_ELEMENT = [
    "id",
    "category",
    "attributes",
    "region_labels",
    "motion_keypoints",
    "depth_span",
    "area_span",
]


def serialize_condensed(condensed: CondensedTwin) -> str:
    def elem(el: CondensedElement) -> str:
        labels = ",".join(json.dumps(v) for v in el.region_labels)
        kps = ",".join(f"[{f},{fmt4(x)},{fmt4(y)}]" for f, x, y in el.motion_keypoints)
        return (
            f'{{"id":{el.id},"category":{json.dumps(el.category)},'
            f'"attributes":{json.dumps(el.attributes)},"region_labels":[{labels}],'
            f'"motion_keypoints":[{kps}],'
            f'"depth_span":[{fmt4(el.depth_span[0])},{fmt4(el.depth_span[1])}],'
            f'"area_span":[{el.area_span[0]},{el.area_span[1]}]}}'
        )

    elements = ",".join(elem(e) for e in condensed.elements)
    return (
        f'{{"summary":{json.dumps(condensed.summary)},'
        f'"spatial_summary":{json.dumps(condensed.spatial_summary)},'
        f'"elements":[{elements}]}}'
    )


def condensed_to_obj(condensed: CondensedTwin) -> dict:
    """Plain-JSON object form (used on the LLM wire)."""
    return json.loads(serialize_condensed(condensed))


def parse_condensed_obj(doc) -> CondensedTwin:
    """Parse the JSON-object form of a condensed document."""
    if not isinstance(doc, dict):
        raise SchemaError(f"expected object, got {type(doc).__name__}", "$")
    missing = [k for k in _CONDENSED_TOP if k not in doc]
    extra = [k for k in doc if k not in _CONDENSED_TOP]
    if missing:
        raise SchemaError(f"missing keys {missing}", "$")
    if extra:
        raise SchemaError(f"unexpected keys {extra}", "$")
    if not isinstance(doc["summary"], str) or not isinstance(doc["spatial_summary"], str):
        raise SchemaError("summary fields must be strings", "$")
    if not isinstance(doc["elements"], list):
        raise SchemaError("elements must be an array", "$.elements")
    elements = []
    for i, e in enumerate(doc["elements"]):
        path = f"$.elements[{i}]"
        if not isinstance(e, dict):
            raise SchemaError("element must be an object", path)
        missing = [k for k in _CONDENSED_ELEMENT if k not in e]
        extra = [k for k in e if k not in _CONDENSED_ELEMENT]
        if missing:
            raise SchemaError(f"missing keys {missing}", path)
        if extra:
            raise SchemaError(f"unexpected keys {extra}", path)
        if isinstance(e["id"], bool) or not isinstance(e["id"], int):
            raise SchemaError("id must be an integer", f"{path}.id")
        kps = e["motion_keypoints"]
        if not isinstance(kps, list) or any(
            not isinstance(k, list)
            or len(k) != 3
            or isinstance(k[0], bool)
            or not isinstance(k[0], int)
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in k[1:])
            for k in kps
        ):
            raise SchemaError("motion_keypoints must be [frame, x, y] triples", f"{path}.motion_keypoints")
        for span_key in ("depth_span", "area_span"):
            span = e[span_key]
            if (
                not isinstance(span, list)
                or len(span) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in span)
            ):
                raise SchemaError(f"{span_key} must be [min, max]", f"{path}.{span_key}")
        labels = e["region_labels"]
        if not isinstance(labels, list) or not all(isinstance(v, str) for v in labels):
            raise SchemaError("region_labels must be strings", f"{path}.region_labels")
        if not isinstance(e["category"], str) or not isinstance(e["attributes"], str):
            raise SchemaError("category/attributes must be strings", path)
        elements.append(
            CondensedElement(
                id=e["id"],
                category=e["category"],
                attributes=e["attributes"],
                region_labels=tuple(labels),
                motion_keypoints=tuple(
                    (int(f), round4(x), round4(y)) for f, x, y in kps
                ),
                depth_span=(round4(e["depth_span"][0]), round4(e["depth_span"][1])),
                area_span=(int(e["area_span"][0]), int(e["area_span"][1])),
            )
        )
    return CondensedTwin(
        summary=doc["summary"],
        spatial_summary=doc["spatial_summary"],
        elements=tuple(elements),
    )


def parse_condensed(text: str) -> CondensedTwin:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TwinSyntaxError(f"malformed condensed document: {exc}") from None
    return parse_condensed_obj(doc)
