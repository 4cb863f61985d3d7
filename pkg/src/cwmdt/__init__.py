"""Counterfactual world-model engine over digital-twin scene representations.

The engine turns a short video (or a seeded scenario) into a frame-indexed
digital twin, applies a requested intervention to that twin, propagates the
edit forward kinematically, and synthesizes counterfactual video samples,
scoring each against the twin that produced it. A deterministic 2D simulator
doubles as data generator and as the brute-force oracle the test suite
checks the twin-level reasoning against.
"""

from . import (
    intervene,
    metrics,
    perception,
    pipeline,
    service,
    sim,
    synthesize,
    twin,
)
from .errors import EngineError
from .video import Frame, Video

__version__ = "0.1.0"

__all__ = [
    "EngineError",
    "Frame",
    "Video",
    "__version__",
    "intervene",
    "metrics",
    "perception",
    "pipeline",
    "service",
    "sim",
    "synthesize",
    "twin",
]
