from .backend import BackendConfig
from .dsl import (
    KINDS,
    NULL_INTERVENTION,
    AttributeSpec,
    Intervention,
    parse_attributes,
    parse_intervention,
)
from .llm import llm_edit
from .motion import estimate_element_motion, estimate_motion
from .propagate import CounterfactualTwin, propagate
from .sampling import perturbed_velocity, sample_trajectories

__all__ = [
    "AttributeSpec",
    "BackendConfig",
    "CounterfactualTwin",
    "Intervention",
    "KINDS",
    "NULL_INTERVENTION",
    "estimate_element_motion",
    "estimate_motion",
    "llm_edit",
    "parse_attributes",
    "parse_intervention",
    "perturbed_velocity",
    "propagate",
    "sample_trajectories",
]
