"""Twin-level counterfactual propagation.

Applies an intervention to the frame-t records and rolls the scene
forward k frames. The kinematic model is, by documented contract, the
same rule the world simulator uses (constant velocity, elastic
reflection at the grid edges, per-step 4-digit quantization), but the
code here is written against the twin representation and shares no
implementation with the simulator; equality of the two routes is what
the oracle tests check.

Factual records inside the source twin's coverage are copied verbatim
for untouched objects, so a NULL intervention reproduces the factual
twin exactly. Beyond the source's last frame, and for the intervened
object from frame t on, records are rolled kinematically and their masks
regenerated by rasterization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..colors import color_to_rgb
from ..errors import (
    HorizonError,
    InvalidParam,
    RangeError,
    UnknownId,
    UnsupportedIntervention,
)
from ..perception.describe import caption, scene_summary, spatial_summary
from ..quantize import round4
from ..raster import rasterize
from ..twin.model import (
    ObjectRecord,
    ObjectTrace,
    TwinSequence,
    build_element,
    build_twin,
    make_record,
    require_valid,
)
from .dsl import Intervention, parse_attributes
from .motion import estimate_element_motion

DEFAULT_GRID = (64, 64)


@dataclass(frozen=True)
class CounterfactualTwin:
    twin: TwinSequence
    provenance: str
    intervention: Intervention


def _advance(pos: float, vel: float, lo: float, hi: float) -> tuple[float, float]:
    # documented step rule: quantize, then reflect about whichever limit
    # was crossed until the position is admissible (touching is allowed)
    p = round4(pos + vel)
    v = vel
    while p < lo or p > hi:
        if p < lo:
            p = round4(2.0 * lo - p)
        else:
            p = round4(2.0 * hi - p)
        v = -v
    return p, v


def _roll(
    start: tuple[float, float],
    velocity: tuple[float, float],
    size: tuple[int, int],
    grid: tuple[int, int],
    steps: int,
    frozen_steps: int = 0,
) -> list[tuple[float, float]]:
    """Positions after each of `steps` frames (start excluded).

    The first frozen_steps transitions hold position; motion resumes after.
    """
    w, h = size
    gw, gh = grid
    x, y = start
    vx, vy = velocity
    out = []
    for i in range(steps):
        if i < frozen_steps:
            out.append((x, y))
            continue
        x, vx = _advance(x, vx, w / 2.0, gw - w / 2.0)
        y, vy = _advance(y, vy, h / 2.0, gh - h / 2.0)
        out.append((x, y))
    return out


def _int_size(spatial) -> tuple[int, int]:
    return (int(round(spatial.w)), int(round(spatial.h)))


def _rolled_records(
    element_id: int,
    category: str,
    attributes: str,
    z: float,
    size: tuple[int, int],
    grid: tuple[int, int],
    start_frame: int,
    start_pos: tuple[float, float],
    velocity: tuple[float, float],
    frames: int,
    frozen_steps: int = 0,
) -> list[ObjectRecord]:
    positions = _roll(start_pos, velocity, size, grid, frames, frozen_steps)
    out = []
    for i, (x, y) in enumerate(positions):
        mask = rasterize(category, x, y, size[0], size[1], grid[0], grid[1])
        out.append(
            make_record(
                element_id, category, attributes, start_frame + 1 + i,
                x=x, y=y, z=z, w=size[0], h=size[1], mask=mask,
            )
        )
    return out


def _copy_then_roll(
    el: ObjectTrace,
    t: int,
    end: int,
    source_end: int,
    grid: tuple[int, int],
    velocity_override: tuple[float, float] | None = None,
) -> tuple[list[ObjectRecord], list[str]]:
    """Untouched-object records over [t, end]: verbatim inside the source's
    coverage, kinematic continuation past it (unless the object departed
    before the source ended, in which case it stays departed)."""
    records: list[ObjectRecord] = []
    captions: list[str] = []
    lo = max(t, el.first_frame)
    hi = min(end, el.last_frame)
    for frame in range(lo, hi + 1):
        idx = frame - el.first_frame
        records.append(el.records[idx])
        captions.append(el.frame_captions[idx])
    if el.last_frame == source_end and el.last_frame < end and records:
        last = records[-1]
        if velocity_override is not None:
            velocity = (round4(velocity_override[0]), round4(velocity_override[1]))
        else:
            velocity = estimate_element_motion(
                el.centroid_trace, el.first_frame, el.last_frame
            )
        rolled = _rolled_records(
            el.id, el.category, el.attributes, last.spatial.z,
            _int_size(last.spatial), grid, el.last_frame,
            (last.spatial.x, last.spatial.y), velocity,
            end - el.last_frame,
        )
        records.extend(rolled)
        captions.extend(
            caption(el.attributes, r.spatial.x, r.spatial.y, grid[0], grid[1])
            for r in rolled
        )
    return records, captions


def propagate(
    source: TwinSequence,
    intervention: Intervention,
    k: int,
    motion: dict[int, tuple[float, float]] | None = None,
) -> CounterfactualTwin:
    """Counterfactual twin over frames [t, t+k] for the given edit.

    motion overrides the velocity used to roll specific ids; anything not
    supplied is estimated from the source traces.
    """
    if k < 0:
        raise HorizonError(f"horizon must be non-negative, got {k}")
    if intervention.kind not in ("NULL", "REMOVE", "REPLACE", "SET_MOTION", "SET_ATTRIBUTE", "FREEZE"):
        raise UnsupportedIntervention(f"kind {intervention.kind!r} has no propagation rule")
    t = intervention.at_frame
    if not (source.frame_range[0] <= t <= source.frame_range[1]):
        raise RangeError(f"at_frame {t} outside source range {source.frame_range}")
    end = t + k
    source_end = source.frame_range[1]
    grid = source.grid_size() or DEFAULT_GRID
    motion = motion or {}

    kind = intervention.kind
    target = None
    if kind != "NULL":
        target = source.element(intervention.target_id)
        if target is None or target.record_at(t) is None:
            raise UnknownId(
                f"no object with id {intervention.target_id} at frame {t}"
            )

    def velocity_for(el: ObjectTrace, at: int) -> tuple[float, float]:
        if el.id in motion:
            vx, vy = motion[el.id]
            return (round4(vx), round4(vy))
        return estimate_element_motion(el.centroid_trace, el.first_frame, at)

    elements: list[ObjectTrace] = []
    for el in source.major_elements:
        if target is not None and el.id == target.id:
            continue  # handled below
        if el.last_frame < t or el.first_frame > end:
            continue
        records, captions = _copy_then_roll(
            el, t, end, source_end, grid, motion.get(el.id)
        )
        if records:
            elements.append(
                build_element(el.id, el.category, el.attributes, records, captions)
            )

    if target is not None and kind != "REMOVE":
        rec_t = target.record_at(t)
        z = rec_t.spatial.z
        start = (rec_t.spatial.x, rec_t.spatial.y)
        category = target.category
        attributes = target.attributes
        size = _int_size(rec_t.spatial)
        frozen_steps = 0
        velocity = velocity_for(target, t)
        first_record: ObjectRecord | None = target.records[t - target.first_frame]
        first_caption = target.frame_captions[t - target.first_frame]

        if kind == "SET_MOTION":
            vx, vy = intervention.velocity
            if not (math.isfinite(vx) and math.isfinite(vy)):
                raise InvalidParam("velocity must be finite")
            velocity = (round4(vx), round4(vy))
        elif kind == "FREEZE":
            duration = intervention.duration
            frozen_steps = k if duration is None else min(duration, k)
        elif kind in ("REPLACE", "SET_ATTRIBUTE"):
            spec = parse_attributes(intervention.attributes)
            color_to_rgb(spec.color)  # validates the color
            if kind == "SET_ATTRIBUTE":
                if spec.shape is not None and spec.shape != category:
                    raise InvalidParam(
                        f"SET_ATTRIBUTE cannot change shape ({category} -> {spec.shape})"
                    )
            elif spec.shape is not None:
                category = spec.shape
            if spec.size is not None:
                size = spec.size
            if category == "circle" and size[0] != size[1]:
                raise InvalidParam(f"circle size must be square, got {size}")
            if not (
                size[0] / 2.0 <= start[0] <= grid[0] - size[0] / 2.0
                and size[1] / 2.0 <= start[1] <= grid[1] - size[1] / 2.0
            ):
                raise InvalidParam(
                    f"size {size} does not fit at ({start[0]}, {start[1]})"
                )
            attributes = f"{spec.color} {category}"
            mask = rasterize(category, start[0], start[1], size[0], size[1], grid[0], grid[1])
            first_record = make_record(
                target.id, category, attributes, t,
                x=start[0], y=start[1], z=z, w=size[0], h=size[1], mask=mask,
            )
            first_caption = caption(attributes, start[0], start[1], grid[0], grid[1])

        records = [first_record]
        captions = [first_caption]
        if kind == "FREEZE" and frozen_steps > 0:
            held = [
                ObjectRecord(
                    id=first_record.id,
                    category=first_record.category,
                    attributes=first_record.attributes,
                    frame=t + 1 + i,
                    spatial=first_record.spatial,
                    mask=first_record.mask,
                )
                for i in range(frozen_steps)
            ]
            records.extend(held)
            captions.extend([first_caption] * frozen_steps)
            if frozen_steps < k:
                rolled = _rolled_records(
                    target.id, category, attributes, z, size, grid,
                    t + frozen_steps, start, velocity, k - frozen_steps,
                )
                # rolled frames start at t + frozen_steps + 1 already
                records.extend(rolled)
                captions.extend(
                    caption(attributes, r.spatial.x, r.spatial.y, grid[0], grid[1])
                    for r in rolled
                )
        else:
            rolled = _rolled_records(
                target.id, category, attributes, z, size, grid,
                t, start, velocity, k,
            )
            records.extend(rolled)
            captions.extend(
                caption(attributes, r.spatial.x, r.spatial.y, grid[0], grid[1])
                for r in rolled
            )
        elements.append(
            build_element(target.id, category, attributes, records, captions)
        )

    elements.sort(key=lambda el: el.id)
    twin = build_twin(
        scene_summary(elements), spatial_summary(elements), (t, end), elements
    )
    return CounterfactualTwin(
        twin=require_valid(twin),
        provenance="deterministic",
        intervention=intervention,
    )
