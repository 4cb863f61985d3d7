"""Run orchestration: configuration, the artifact store, and the runner."""

from .config import (
    KEYS,
    RunConfig,
    canonical_obj,
    diffusion_config,
    env_name,
    intervene_config,
    load_config,
    parse_background,
    parse_config_text,
    render_style,
    with_overrides,
)
from .runner import (
    RunResult,
    canonical_request,
    compute_run_id,
    input_descriptor,
    load_run,
    run_counterfactual,
)
from .store import SessionStore, blob_hash

__all__ = [
    "KEYS",
    "RunConfig",
    "RunResult",
    "SessionStore",
    "blob_hash",
    "canonical_obj",
    "canonical_request",
    "compute_run_id",
    "diffusion_config",
    "env_name",
    "input_descriptor",
    "intervene_config",
    "load_config",
    "load_run",
    "parse_background",
    "parse_config_text",
    "render_style",
    "run_counterfactual",
    "with_overrides",
]
