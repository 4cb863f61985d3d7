"""Backend selection and connection settings for intervention reasoning."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InvalidParam


@dataclass(frozen=True)
class BackendConfig:
    backend: str = "deterministic"  # deterministic | llm
    endpoint: str | None = None
    token: str | None = None
    timeout: float = 10.0
    retries: int = 0  # transport retry budget (llm only)
    samples: int = 3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.backend not in ("deterministic", "llm"):
            raise InvalidParam(f"unknown intervene backend {self.backend!r}")
        if self.samples < 1:
            raise InvalidParam(f"sample count must be at least 1, got {self.samples}")
        if self.retries < 0:
            raise InvalidParam("retry budget must be non-negative")
