"""Exception hierarchy for the engine.

Every error raised by the public API derives from EngineError so callers
(CLI, service) can map domain failures to exit code 1 / HTTP 4xx uniformly.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all domain errors."""

    code = "ENGINE_ERROR"


# --- twin documents ---

class TwinSyntaxError(EngineError):
    """Document is not well-formed (bad JSON, truncated input)."""

    code = "TWIN_SYNTAX"


class SchemaError(EngineError):
    """Document is well-formed but violates the twin schema."""

    code = "TWIN_SCHEMA"

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class InvariantError(EngineError):
    """A structurally valid twin fails validation invariants."""

    code = "TWIN_INVARIANT"

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(f"{v.code} at {v.path}: {v.message}" for v in self.violations)
        super().__init__(f"twin validation failed: {lines}")


class RangeError(EngineError):
    """Frame range inconsistent with the data it should describe."""

    code = "RANGE"


# --- simulator ---

class PlacementError(EngineError):
    """Scenario generation could not place objects without overlap."""

    code = "PLACEMENT"


class InvalidParam(EngineError):
    """An edit or request parameter is out of its documented domain."""

    code = "INVALID_PARAM"


class UnknownId(EngineError):
    """Referenced object id does not exist in the target state or twin."""

    code = "UNKNOWN_ID"


# --- intervention DSL ---

class ParseError(EngineError):
    """Intervention text failed to parse; carries the byte offset."""

    code = "PARSE"

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownKeyword(ParseError):
    """Leading token is not a known command keyword."""

    code = "UNKNOWN_KEYWORD"


class HorizonError(EngineError):
    """Propagation horizon is negative or otherwise unusable."""

    code = "HORIZON"


class UnsupportedIntervention(EngineError):
    """Intervention kind has no implementation for the requested path."""

    code = "UNSUPPORTED_INTERVENTION"


# --- rendering / synthesis ---

class UnknownShape(EngineError):
    code = "UNKNOWN_SHAPE"


class UnknownColor(EngineError):
    code = "UNKNOWN_COLOR"


class DimensionMismatch(EngineError):
    """Frames disagree in size where equality is required."""

    code = "DIMENSION_MISMATCH"


class TooSmall(EngineError):
    """Input below the minimum size a metric supports."""

    code = "TOO_SMALL"


class TooShort(EngineError):
    """Sequence has too few frames for the requested measure."""

    code = "TOO_SHORT"


class RangeMismatch(EngineError):
    """Twin and video cover inconsistent frame ranges."""

    code = "RANGE_MISMATCH"


# --- external backends ---

class TransportError(EngineError):
    """Network-level failure talking to an external backend."""

    code = "TRANSPORT"


class BudgetExceeded(EngineError):
    """Retry budget exhausted by repeated transport failures."""

    code = "BUDGET_EXCEEDED"


class InvalidReply(EngineError):
    """Backend reply stayed malformed after the single repair round."""

    code = "INVALID_REPLY"


class FrameCountMismatch(EngineError):
    """Diffusion backend returned the wrong number of frames."""

    code = "FRAME_COUNT_MISMATCH"


# --- pipeline / service ---

class ConsistencyRejected(EngineError):
    """First-frame consistency score fell below the configured threshold."""

    code = "CONSISTENCY_REJECTED"

    def __init__(self, score: float, threshold: float):
        super().__init__(
            f"first-frame consistency {score:.4f} below threshold {threshold:.4f}"
        )
        self.score = score
        self.threshold = threshold


class ConfigurationError(EngineError):
    """Pipeline asked for a backend or resource that is not configured."""

    code = "CONFIGURATION"


class StageError(EngineError):
    """Wraps a failure with the pipeline stage it occurred in."""

    code = "STAGE"

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}': {cause}")
        self.stage = stage
        self.cause = cause


class BindError(EngineError):
    """Service could not bind its host/port."""

    code = "BIND"


class StoreError(EngineError):
    """Session store is missing or corrupt for the requested entry."""

    code = "STORE"
