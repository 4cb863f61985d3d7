from .groundtruth import groundtruth_twin
from .render import BACKGROUND, object_cells, render_state, render_states, visible_mask
from .world import (
    PLACEMENT_RETRIES,
    ScenarioSpec,
    SimObject,
    WorldState,
    apply_world_edit,
    check_state,
    generate_scenario,
    parse_scenario_file,
    parse_world,
    serialize_scenario,
    serialize_world,
    simulate,
    step,
)

__all__ = [
    "BACKGROUND",
    "PLACEMENT_RETRIES",
    "ScenarioSpec",
    "SimObject",
    "WorldState",
    "apply_world_edit",
    "check_state",
    "generate_scenario",
    "groundtruth_twin",
    "object_cells",
    "parse_scenario_file",
    "parse_world",
    "render_state",
    "render_states",
    "serialize_scenario",
    "serialize_world",
    "simulate",
    "step",
    "visible_mask",
]
