"""Rule-based check that a counterfactual video realizes its intervention.

The video is expected to start at the intervention frame. Postconditions
are observed from pixels alone (segmentation and perception of the
video); the factual twin supplies only the target's identity: its color,
category, and position at the intervention frame. The score is the
fraction of satisfied postconditions:

  REMOVE        one postcondition per frame: target color absent
  SET_MOTION    mean perceived velocity within 0.5 cells/frame of the
                request, per component (one postcondition)
  FREEZE        one postcondition per covered frame: displacement from
                the first frame at most 0.5 cells
  REPLACE       new color present in every frame; first-frame centroid
                within 1.0 cells of the factual target; old color absent
                in every frame (skipped when the colors coincide)
  NULL          1.0 by definition
"""

from __future__ import annotations

import math

from ..colors import color_to_rgb
from ..errors import UnknownId, UnsupportedIntervention
from ..intervene.dsl import Intervention, parse_attributes
from ..perception.perceive import perceive
from ..perception.segment import segment
from ..synthesize.render import record_color
from ..twin.model import ObjectTrace, TwinSequence
from ..video import Video

VELOCITY_TOLERANCE = 0.5  # cells/frame, per component
FREEZE_TOLERANCE = 0.5  # cells
POSITION_TOLERANCE = 1.0  # cells


def _target(factual: TwinSequence, intervention: Intervention) -> ObjectTrace:
    el = factual.element(intervention.target_id)
    if el is None or el.record_at(intervention.at_frame) is None:
        raise UnknownId(
            f"no object with id {intervention.target_id} "
            f"at frame {intervention.at_frame}"
        )
    return el


def _color_present(frame, color, background) -> bool:
    return any(region.color == color for region in segment(frame, background))


def _observed_by_color(observed: TwinSequence, color) -> ObjectTrace | None:
    for el in observed.major_elements:
        if record_color(el.records[0]) == color:
            return el
    return None


def intervention_success(
    factual: TwinSequence,
    counterfactual_video: Video,
    intervention: Intervention,
    background: tuple[int, int, int] = (0, 0, 0),
) -> float:
    kind = intervention.kind
    if kind == "NULL":
        return 1.0
    if kind not in ("REMOVE", "REPLACE", "SET_MOTION", "SET_ATTRIBUTE", "FREEZE"):
        raise UnsupportedIntervention(f"no postconditions defined for {kind!r}")

    target = _target(factual, intervention)
    target_color = record_color(target.records[0])
    frames = counterfactual_video.frames

    if kind == "REMOVE":
        absent = sum(
            1 for f in frames if not _color_present(f, target_color, background)
        )
        return absent / len(frames)

    if kind == "FREEZE":
        duration = intervention.duration
        horizon = len(frames) - 1
        span = horizon if duration is None else min(duration, horizon)
        observed = perceive(counterfactual_video, background)
        el = _observed_by_color(observed, target_color)
        if el is None or el.first_frame > 0:
            return 0.0
        x0, y0 = el.centroid_trace[0]
        satisfied = 0
        for offset in range(1, span + 1):
            rec = el.record_at(offset)
            if rec is None:
                continue
            if math.hypot(rec.spatial.x - x0, rec.spatial.y - y0) <= FREEZE_TOLERANCE:
                satisfied += 1
        return satisfied / span if span else 1.0

    if kind == "SET_MOTION":
        observed = perceive(counterfactual_video, background)
        el = _observed_by_color(observed, target_color)
        if el is None or len(el.centroid_trace) < 2:
            return 0.0
        n = len(el.centroid_trace) - 1
        vx = (el.centroid_trace[-1][0] - el.centroid_trace[0][0]) / n
        vy = (el.centroid_trace[-1][1] - el.centroid_trace[0][1]) / n
        wx, wy = intervention.velocity
        ok = (
            abs(vx - wx) <= VELOCITY_TOLERANCE
            and abs(vy - wy) <= VELOCITY_TOLERANCE
        )
        return 1.0 if ok else 0.0

    # REPLACE and SET_ATTRIBUTE share the appearance postconditions
    spec = parse_attributes(intervention.attributes)
    new_color = color_to_rgb(spec.color)
    postconditions = []

    present = all(_color_present(f, new_color, background) for f in frames)
    postconditions.append(present)

    rec_t = target.record_at(intervention.at_frame)
    match = False
    for region in segment(frames[0], background):
        if region.color != new_color:
            continue
        cx, cy = region.centroid
        if math.hypot(cx - rec_t.spatial.x, cy - rec_t.spatial.y) <= POSITION_TOLERANCE:
            match = True
            break
    postconditions.append(match)

    if new_color != target_color:
        gone = all(
            not _color_present(f, target_color, background) for f in frames
        )
        postconditions.append(gone)

    return sum(postconditions) / len(postconditions)
