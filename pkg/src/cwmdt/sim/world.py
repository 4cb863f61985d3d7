"""Deterministic 2-d world simulator.

Objects move with constant velocity and reflect elastically off the
world edges; there are no object-object collisions (depth layers order
overlap for rendering only). Positions and velocities live on the
4-fractional-digit grid and every step re-quantizes, so trajectories are
exactly representable in twin documents.

Step rule per axis (documented contract, mirrored by the twin-level
propagation):

    pos' = round4(pos + vel)
    while pos' crosses a limit:  pos' = round4(2 * limit - pos'); vel = -vel

with limits [size/2, world - size/2]; touching a limit exactly is not a
crossing. Frozen objects (frame_index < frozen_until) do not move.
"""

from __future__ import annotations

import json
import math
import random
import re
from dataclasses import dataclass, replace

from ..colors import PALETTE, color_to_rgb
from ..errors import (
    InvalidParam,
    PlacementError,
    SchemaError,
    TwinSyntaxError,
    UnknownId,
    UnsupportedIntervention,
)
from ..intervene.dsl import Intervention, parse_attributes
from ..quantize import round4

WORLD_VERSION = "1"
MIN_WORLD_SIDE = 16
PLACEMENT_RETRIES = 100
_NEVER = 1 << 31  # frozen_until sentinel for open-ended freezes


@dataclass(frozen=True)
class SimObject:
    id: int
    shape: str  # rectangle | circle
    color: str
    size: tuple[int, int]  # (w, h) cells; circles have w == h
    position: tuple[float, float]
    velocity: tuple[float, float]
    depth_layer: int  # 0 = nearest
    frozen_until: int = 0  # absolute frame index; motion suspended before it


@dataclass(frozen=True)
class WorldState:
    width: int
    height: int
    frame_index: int
    objects: tuple[SimObject, ...]


@dataclass(frozen=True)
class ScenarioSpec:
    seed: int = 0
    width: int = 64
    height: int = 64
    min_objects: int = 2
    max_objects: int = 5
    min_size: int = 4
    max_size: int = 10
    min_speed: float = 0.5
    max_speed: float = 2.0


def _check_object(obj: SimObject, width: int, height: int) -> None:
    w, h = obj.size
    if w < 1 or h < 1:
        raise InvalidParam(f"object {obj.id} size {obj.size} not positive")
    if w > width or h > height:
        raise InvalidParam(f"object {obj.id} size {obj.size} exceeds world {width}x{height}")
    if obj.shape == "circle" and w != h:
        raise InvalidParam(f"circle {obj.id} must have equal sides, got {obj.size}")
    if obj.shape not in ("rectangle", "circle"):
        raise InvalidParam(f"object {obj.id} has unknown shape {obj.shape!r}")
    x, y = obj.position
    if not (w / 2.0 <= x <= width - w / 2.0) or not (h / 2.0 <= y <= height - h / 2.0):
        raise InvalidParam(f"object {obj.id} at {obj.position} not contained in world")
    if not all(math.isfinite(v) for v in (*obj.position, *obj.velocity)):
        raise InvalidParam(f"object {obj.id} has non-finite position or velocity")


def check_state(state: WorldState) -> WorldState:
    if state.width < MIN_WORLD_SIDE or state.height < MIN_WORLD_SIDE:
        raise InvalidParam(
            f"world {state.width}x{state.height} below minimum {MIN_WORLD_SIDE}"
        )
    seen = set()
    for obj in state.objects:
        if obj.id in seen:
            raise InvalidParam(f"duplicate object id {obj.id}")
        seen.add(obj.id)
        _check_object(obj, state.width, state.height)
    return state


def _advance(pos: float, vel: float, lo: float, hi: float) -> tuple[float, float]:
    p = round4(pos + vel)
    v = vel
    while p < lo or p > hi:
        if p < lo:
            p = round4(2.0 * lo - p)
        else:
            p = round4(2.0 * hi - p)
        v = -v
    return p, v


def step(state: WorldState) -> WorldState:
    """Advance one frame; reflects at edges, honors freeze intervals."""
    moved = []
    for obj in state.objects:
        if state.frame_index < obj.frozen_until:
            moved.append(obj)
            continue
        w, h = obj.size
        x, vx = _advance(obj.position[0], obj.velocity[0], w / 2.0, state.width - w / 2.0)
        y, vy = _advance(obj.position[1], obj.velocity[1], h / 2.0, state.height - h / 2.0)
        moved.append(replace(obj, position=(x, y), velocity=(vx, vy)))
    return replace(state, frame_index=state.frame_index + 1, objects=tuple(moved))


def simulate(state: WorldState, k: int) -> list[WorldState]:
    """States for frames [frame_index, frame_index + k], initial included."""
    if k < 0:
        raise InvalidParam(f"step count must be non-negative, got {k}")
    states = [state]
    for _ in range(k):
        states.append(step(states[-1]))
    return states


# --- edits ---

def apply_world_edit(state: WorldState, edit: Intervention) -> WorldState:
    """Ground-truth intervention semantics on the raw world state."""
    if edit.kind == "NULL":
        return state
    target = None
    for obj in state.objects:
        if obj.id == edit.target_id:
            target = obj
            break
    if target is None:
        raise UnknownId(f"no object with id {edit.target_id}")

    if edit.kind == "REMOVE":
        rest = tuple(o for o in state.objects if o.id != edit.target_id)
        return replace(state, objects=rest)

    if edit.kind == "SET_MOTION":
        assert edit.velocity is not None
        vx, vy = edit.velocity
        if not (math.isfinite(vx) and math.isfinite(vy)):
            raise InvalidParam("velocity must be finite")
        new = replace(target, velocity=(round4(vx), round4(vy)))
    elif edit.kind == "FREEZE":
        until = _NEVER if edit.duration is None else state.frame_index + edit.duration
        new = replace(target, frozen_until=until)
    elif edit.kind in ("REPLACE", "SET_ATTRIBUTE"):
        assert edit.attributes is not None
        spec = parse_attributes(edit.attributes)
        color_to_rgb(spec.color)  # validates the color name
        shape = target.shape
        if edit.kind == "REPLACE":
            if spec.shape is not None:
                shape = spec.shape
        elif spec.shape is not None and spec.shape != target.shape:
            raise InvalidParam(
                f"SET_ATTRIBUTE cannot change shape ({target.shape} -> {spec.shape})"
            )
        size = spec.size if spec.size is not None else target.size
        if shape == "circle" and size[0] != size[1]:
            raise InvalidParam(f"circle size must be square, got {size}")
        new = replace(target, shape=shape, color=spec.color, size=size)
        _check_object(new, state.width, state.height)
    else:
        raise UnsupportedIntervention(f"kind {edit.kind!r} has no world semantics")

    objects = tuple(new if o.id == edit.target_id else o for o in state.objects)
    return replace(state, objects=objects)


# --- scenario generation ---

def _bbox(obj: SimObject) -> tuple[float, float, float, float]:
    x, y = obj.position
    w, h = obj.size
    return (x - w / 2.0, y - h / 2.0, x + w / 2.0, y + h / 2.0)


def _overlaps(a: SimObject, b: SimObject) -> bool:
    ax0, ay0, ax1, ay1 = _bbox(a)
    bx0, by0, bx1, by1 = _bbox(b)
    return ax0 < bx1 and bx0 < ax1 and ay0 < by1 and by0 < ay1


def generate_scenario(spec: ScenarioSpec, seed: int | None = None) -> WorldState:
    """Seeded world with non-overlapping objects, distinct colors and depths.

    Each object gets PLACEMENT_RETRIES placement attempts; exhausting them
    raises PlacementError.
    """
    if spec.width < MIN_WORLD_SIDE or spec.height < MIN_WORLD_SIDE:
        raise InvalidParam(f"world must be at least {MIN_WORLD_SIDE} cells per side")
    if not (1 <= spec.min_objects <= spec.max_objects):
        raise InvalidParam("object count range is invalid")
    if spec.max_objects > len(PALETTE):
        raise InvalidParam(f"at most {len(PALETTE)} objects (distinct colors) supported")
    if not (3 <= spec.min_size <= spec.max_size):
        raise InvalidParam("size range must start at 3 or above")
    if spec.max_size > min(spec.width, spec.height) // 2:
        raise InvalidParam("max size too large for the world")
    if not (0.0 <= spec.min_speed <= spec.max_speed):
        raise InvalidParam("speed range is invalid")

    rng = random.Random(spec.seed if seed is None else seed)
    count = rng.randint(spec.min_objects, spec.max_objects)
    colors = rng.sample(sorted(PALETTE.keys()), count)
    layers = list(range(count))
    rng.shuffle(layers)

    objects: list[SimObject] = []
    for i in range(count):
        shape = rng.choice(("rectangle", "circle"))
        if shape == "circle":
            side = rng.randint(max(4, spec.min_size), spec.max_size)
            size = (side, side)
        else:
            size = (rng.randint(spec.min_size, spec.max_size),
                    rng.randint(spec.min_size, spec.max_size))
        speed = rng.uniform(spec.min_speed, spec.max_speed)
        angle = rng.uniform(0.0, 2.0 * math.pi)
        velocity = (round4(speed * math.cos(angle)), round4(speed * math.sin(angle)))
        placed = None
        for _ in range(PLACEMENT_RETRIES):
            x = round4(rng.uniform(size[0] / 2.0, spec.width - size[0] / 2.0))
            y = round4(rng.uniform(size[1] / 2.0, spec.height - size[1] / 2.0))
            candidate = SimObject(
                id=i,
                shape=shape,
                color=colors[i],
                size=size,
                position=(x, y),
                velocity=velocity,
                depth_layer=layers[i],
                frozen_until=0,
            )
            if all(not _overlaps(candidate, other) for other in objects):
                placed = candidate
                break
        if placed is None:
            raise PlacementError(
                f"could not place object {i} after {PLACEMENT_RETRIES} attempts"
            )
        objects.append(placed)
    return check_state(
        WorldState(width=spec.width, height=spec.height, frame_index=0, objects=tuple(objects))
    )


# --- world document io ---

def serialize_world(state: WorldState) -> str:
    doc = {
        "world_version": WORLD_VERSION,
        "width": state.width,
        "height": state.height,
        "frame_index": state.frame_index,
        "objects": [
            {
                "id": o.id,
                "shape": o.shape,
                "color": o.color,
                "size": list(o.size),
                "position": list(o.position),
                "velocity": list(o.velocity),
                "depth_layer": o.depth_layer,
                "frozen_until": o.frozen_until,
            }
            for o in state.objects
        ],
    }
    return json.dumps(doc, separators=(",", ":"))


def parse_world(text: str) -> WorldState:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TwinSyntaxError(f"malformed world document: {exc}") from None
    if not isinstance(doc, dict) or doc.get("world_version") != WORLD_VERSION:
        raise SchemaError("missing or unsupported world_version", "$")
    try:
        objects = tuple(
            SimObject(
                id=int(o["id"]),
                shape=str(o["shape"]),
                color=str(o["color"]),
                size=(int(o["size"][0]), int(o["size"][1])),
                position=(float(o["position"][0]), float(o["position"][1])),
                velocity=(float(o["velocity"][0]), float(o["velocity"][1])),
                depth_layer=int(o["depth_layer"]),
                frozen_until=int(o.get("frozen_until", 0)),
            )
            for o in doc["objects"]
        )
        state = WorldState(
            width=int(doc["width"]),
            height=int(doc["height"]),
            frame_index=int(doc["frame_index"]),
            objects=objects,
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise SchemaError(f"bad world document field: {exc}", "$") from None
    return check_state(state)


# --- scenario spec file io ---

_RANGE_RE = re.compile(r"^\s*([0-9.+-]+)\s*\.\.\s*([0-9.+-]+)\s*$")


def parse_scenario_file(text: str) -> ScenarioSpec:
    """Key-value scenario format: 'key = value', ranges as 'a..b', # comments."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SchemaError(f"line {lineno}: expected 'key = value'", "scenario")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()

    def int_field(key: str, default: int) -> int:
        if key not in values:
            return default
        try:
            return int(values[key])
        except ValueError:
            raise SchemaError(f"{key} must be an integer", "scenario") from None

    def range_field(key: str, lo, hi, conv):
        if key not in values:
            return lo, hi
        m = _RANGE_RE.match(values[key])
        if not m:
            raise SchemaError(f"{key} must look like 'a..b'", "scenario")
        try:
            return conv(m.group(1)), conv(m.group(2))
        except ValueError:
            raise SchemaError(f"{key} bounds must be numeric", "scenario") from None

    defaults = ScenarioSpec()
    min_obj, max_obj = range_field("objects", defaults.min_objects, defaults.max_objects, int)
    min_size, max_size = range_field("size", defaults.min_size, defaults.max_size, int)
    min_speed, max_speed = range_field("speed", defaults.min_speed, defaults.max_speed, float)
    known = {"seed", "width", "height", "objects", "size", "speed"}
    unknown = sorted(set(values) - known)
    if unknown:
        raise SchemaError(f"unknown scenario keys {unknown}", "scenario")
    return ScenarioSpec(
        seed=int_field("seed", defaults.seed),
        width=int_field("width", defaults.width),
        height=int_field("height", defaults.height),
        min_objects=min_obj,
        max_objects=max_obj,
        min_size=min_size,
        max_size=max_size,
        min_speed=min_speed,
        max_speed=max_speed,
    )


def serialize_scenario(spec: ScenarioSpec) -> str:
    return (
        f"seed = {spec.seed}\n"
        f"width = {spec.width}\n"
        f"height = {spec.height}\n"
        f"objects = {spec.min_objects}..{spec.max_objects}\n"
        f"size = {spec.min_size}..{spec.max_size}\n"
        f"speed = {spec.min_speed}..{spec.max_speed}\n"
    )
