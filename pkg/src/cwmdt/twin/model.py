"""Digital twin data model and validation.

A TwinSequence is the structured scene description: per-object traces
(captions, areas, depths, centroids) plus per-frame records carrying the
spatial tuple (x, y, z, w, h) and an RLE mask. Float fields live on the
canonical 4-digit grid; constructors quantize so that serialization is
lossless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import InvariantError
from ..quantize import round4
from .rle import Mask

CENTROID_TOLERANCE = 0.5  # cells
BBOX_TOLERANCE = 1.0  # cells


@dataclass(frozen=True)
class SpatialProps:
    x: float
    y: float
    z: float
    w: float
    h: float


@dataclass(frozen=True)
class ObjectRecord:
    id: int
    category: str
    attributes: str
    frame: int
    spatial: SpatialProps
    mask: Mask | None


@dataclass(frozen=True)
class ObjectTrace:
    id: int
    category: str
    attributes: str
    frame_captions: tuple[str, ...]
    area_trace: tuple[int, ...]
    depth_trace: tuple[float, ...]
    centroid_trace: tuple[tuple[float, float], ...]
    records: tuple[ObjectRecord, ...]

    @property
    def first_frame(self) -> int:
        return self.records[0].frame

    @property
    def last_frame(self) -> int:
        return self.records[-1].frame

    def record_at(self, frame: int) -> ObjectRecord | None:
        i = frame - self.first_frame
        if 0 <= i < len(self.records):
            return self.records[i]
        return None


@dataclass(frozen=True)
class TwinSequence:
    summary: str
    spatial_summary: str
    frame_range: tuple[int, int]
    major_elements: tuple[ObjectTrace, ...]

    def element(self, object_id: int) -> ObjectTrace | None:
        for el in self.major_elements:
            if el.id == object_id:
                return el
        return None

    def records_at(self, frame: int) -> tuple[ObjectRecord, ...]:
        out = []
        for el in self.major_elements:
            rec = el.record_at(frame)
            if rec is not None:
                out.append(rec)
        return tuple(out)

    def grid_size(self) -> tuple[int, int] | None:
        """Frame grid carried by the masks, or None for a mask-less twin."""
        for el in self.major_elements:
            for rec in el.records:
                if rec.mask is not None:
                    return (rec.mask.width, rec.mask.height)
        return None


@dataclass(frozen=True)
class Violation:
    code: str
    path: str
    message: str


# --- constructors (quantizing) ---

def make_record(
    object_id: int,
    category: str,
    attributes: str,
    frame: int,
    x: float,
    y: float,
    z: float,
    w: float,
    h: float,
    mask: Mask | None,
) -> ObjectRecord:
    spatial = SpatialProps(
        x=round4(x), y=round4(y), z=round4(z), w=round4(w), h=round4(h)
    )
    return ObjectRecord(
        id=object_id,
        category=category,
        attributes=attributes,
        frame=frame,
        spatial=spatial,
        mask=mask,
    )


def build_element(
    object_id: int,
    category: str,
    attributes: str,
    records: list[ObjectRecord] | tuple[ObjectRecord, ...],
    frame_captions: list[str] | tuple[str, ...],
) -> ObjectTrace:
    """Assemble a trace element; area/depth/centroid traces derive from records."""
    recs = tuple(records)
    areas = tuple(
        r.mask.area if r.mask is not None else int(round(r.spatial.w * r.spatial.h))
        for r in recs
    )
    depths = tuple(r.spatial.z for r in recs)
    centroids = tuple((r.spatial.x, r.spatial.y) for r in recs)
    return ObjectTrace(
        id=object_id,
        category=category,
        attributes=attributes,
        frame_captions=tuple(frame_captions),
        area_trace=areas,
        depth_trace=depths,
        centroid_trace=centroids,
        records=recs,
    )


def build_twin(
    summary: str,
    spatial_summary: str,
    frame_range: tuple[int, int],
    elements: list[ObjectTrace] | tuple[ObjectTrace, ...],
) -> TwinSequence:
    ordered = tuple(sorted(elements, key=lambda el: el.id))
    return TwinSequence(
        summary=summary,
        spatial_summary=spatial_summary,
        frame_range=(int(frame_range[0]), int(frame_range[1])),
        major_elements=ordered,
    )


# --- validation ---

def _finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


def validate(twin: TwinSequence) -> list[Violation]:
    """Check every documented invariant; returns machine-readable violations."""
    out: list[Violation] = []
    first, last = twin.frame_range
    if first > last:
        out.append(
            Violation("FRAME_RANGE", "frame_range", f"first {first} > last {last}")
        )

    seen_ids: set[int] = set()
    prev_id = None
    grid: tuple[int, int] | None = None
    for ei, el in enumerate(twin.major_elements):
        path = f"major_elements[{ei}]"
        if el.id < 0:
            out.append(Violation("ID_NEGATIVE", path, f"id {el.id} is negative"))
        if el.id in seen_ids:
            out.append(Violation("DUPLICATE_ID", path, f"id {el.id} repeated"))
        seen_ids.add(el.id)
        if prev_id is not None and el.id < prev_id:
            out.append(
                Violation("ID_ORDER", path, f"id {el.id} not ascending after {prev_id}")
            )
        prev_id = el.id

        n = len(el.records)
        if n == 0:
            out.append(Violation("EMPTY_ELEMENT", path, "element has no records"))
            continue
        for name, trace in (
            ("frame_captions", el.frame_captions),
            ("area_trace", el.area_trace),
            ("depth_trace", el.depth_trace),
            ("centroid_trace", el.centroid_trace),
        ):
            if len(trace) != n:
                out.append(
                    Violation(
                        "TRACE_LENGTH",
                        f"{path}.{name}",
                        f"length {len(trace)} != record count {n}",
                    )
                )

        for ri, rec in enumerate(el.records):
            rpath = f"{path}.records[{ri}]"
            sp = rec.spatial
            if rec.id != el.id:
                out.append(
                    Violation("RECORD_ID", rpath, f"record id {rec.id} != element id {el.id}")
                )
            if rec.frame != el.records[0].frame + ri:
                out.append(
                    Violation(
                        "PRESENCE_GAP",
                        rpath,
                        f"frame {rec.frame} breaks the contiguous presence interval",
                    )
                )
            if not (first <= rec.frame <= last):
                out.append(
                    Violation(
                        "FRAME_OUT_OF_RANGE",
                        rpath,
                        f"frame {rec.frame} outside frame_range {twin.frame_range}",
                    )
                )
            if not _finite(sp.x, sp.y, sp.z, sp.w, sp.h):
                out.append(Violation("NONFINITE", rpath, "non-finite spatial value"))
                continue
            if sp.w <= 0 or sp.h <= 0:
                out.append(
                    Violation("SIZE_POSITIVE", rpath, f"size ({sp.w}, {sp.h}) not positive")
                )
            if rec.mask is not None:
                if rec.mask.area == 0:
                    out.append(Violation("EMPTY_MASK", rpath, "mask has no cells"))
                else:
                    if grid is None:
                        grid = (rec.mask.width, rec.mask.height)
                    elif (rec.mask.width, rec.mask.height) != grid:
                        out.append(
                            Violation(
                                "GRID_MISMATCH",
                                rpath,
                                f"mask grid {(rec.mask.width, rec.mask.height)} != {grid}",
                            )
                        )
                    _, _, bw, bh = rec.mask.bbox()
                    if abs(bw - sp.w) > BBOX_TOLERANCE or abs(bh - sp.h) > BBOX_TOLERANCE:
                        out.append(
                            Violation(
                                "BBOX_MISMATCH",
                                rpath,
                                f"mask bbox ({bw}, {bh}) vs size ({sp.w}, {sp.h})",
                            )
                        )
                    cx, cy = rec.mask.centroid()
                    if (
                        abs(cx - sp.x) > CENTROID_TOLERANCE
                        or abs(cy - sp.y) > CENTROID_TOLERANCE
                    ):
                        out.append(
                            Violation(
                                "CENTROID_MISMATCH",
                                rpath,
                                f"mask centroid ({cx:.4f}, {cy:.4f}) vs ({sp.x}, {sp.y})",
                            )
                        )
            # trace coherence where the traces exist at this index
            if ri < len(el.area_trace):
                expect = rec.mask.area if rec.mask is not None else el.area_trace[ri]
                if el.area_trace[ri] != expect:
                    out.append(
                        Violation(
                            "AREA_TRACE_MISMATCH",
                            f"{path}.area_trace[{ri}]",
                            f"{el.area_trace[ri]} != mask area {expect}",
                        )
                    )
            if ri < len(el.centroid_trace):
                tx, ty = el.centroid_trace[ri]
                if tx != sp.x or ty != sp.y:
                    out.append(
                        Violation(
                            "CENTROID_TRACE_MISMATCH",
                            f"{path}.centroid_trace[{ri}]",
                            f"({tx}, {ty}) != record ({sp.x}, {sp.y})",
                        )
                    )
            if ri < len(el.depth_trace) and el.depth_trace[ri] != sp.z:
                out.append(
                    Violation(
                        "DEPTH_TRACE_MISMATCH",
                        f"{path}.depth_trace[{ri}]",
                        f"{el.depth_trace[ri]} != record z {sp.z}",
                    )
                )
    return out


def require_valid(twin: TwinSequence) -> TwinSequence:
    violations = validate(twin)
    if violations:
        raise InvariantError(violations)
    return twin
