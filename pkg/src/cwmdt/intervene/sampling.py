"""Multi-sample counterfactual trajectory generation.

Sample 0 is the unperturbed propagation. Samples 1..N-1 perturb the
intervened object's post-intervention velocity by rotating its heading
up to 30 degrees and scaling its speed within [0.75, 1.25], drawn from a
generator seeded with (seed, n) so each sample is individually
reproducible. Only interventions whose target keeps a free velocity are
perturbed: REPLACE, SET_ATTRIBUTE, and FREEZE (after the freeze ends).
SET_MOTION pins the exact requested velocity, and REMOVE/NULL leave no
target, so those kinds propagate identically across samples.
"""

from __future__ import annotations

import math

import numpy as np

from ..quantize import round4
from ..twin.model import TwinSequence
from .backend import BackendConfig
from .dsl import Intervention
from .motion import estimate_element_motion
from .propagate import CounterfactualTwin, propagate

MAX_HEADING = math.pi / 6  # 30 degrees
SPEED_RANGE = (0.75, 1.25)

PERTURBED_KINDS = ("REPLACE", "SET_ATTRIBUTE", "FREEZE")


def perturbed_velocity(
    velocity: tuple[float, float], seed: int, sample: int
) -> tuple[float, float]:
    rng = np.random.default_rng([seed, sample])
    theta = rng.uniform(-MAX_HEADING, MAX_HEADING)
    sigma = rng.uniform(*SPEED_RANGE)
    vx, vy = velocity
    cos, sin = math.cos(theta), math.sin(theta)
    return (
        round4(sigma * (vx * cos - vy * sin)),
        round4(sigma * (vx * sin + vy * cos)),
    )


def sample_trajectories(
    source: TwinSequence,
    intervention: Intervention,
    k: int,
    config: BackendConfig,
) -> list[CounterfactualTwin]:
    base = propagate(source, intervention, k)
    out = [
        CounterfactualTwin(
            twin=base.twin,
            provenance=f"deterministic seed={config.seed} sample=0",
            intervention=intervention,
        )
    ]
    perturb = intervention.kind in PERTURBED_KINDS
    if perturb:
        target = source.element(intervention.target_id)
        base_velocity = estimate_element_motion(
            target.centroid_trace, target.first_frame, intervention.at_frame
        )
    for n in range(1, config.samples):
        if perturb:
            velocity = perturbed_velocity(base_velocity, config.seed, n)
            cf = propagate(
                source, intervention, k, motion={intervention.target_id: velocity}
            )
            twin = cf.twin
        else:
            twin = base.twin
        out.append(
            CounterfactualTwin(
                twin=twin,
                provenance=f"deterministic seed={config.seed} sample={n}",
                intervention=intervention,
            )
        )
    return out
