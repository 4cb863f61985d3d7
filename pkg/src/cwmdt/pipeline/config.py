"""Run configuration: defaults, config files, and environment overrides.

A configuration is a flat set of dotted keys. Values come from three layers,
each overriding the previous one:

1. built-in defaults,
2. a key-value config file (``key = value``, ``#`` comments),
3. environment variables named ``CWMDT_<KEY>`` where the key is upper-cased
   and dots become underscores (``llm.endpoint`` -> ``CWMDT_LLM_ENDPOINT``).

Explicit overrides (CLI flags) are applied last by the caller via
``load_config(..., overrides=...)``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

from ..errors import ConfigurationError
from ..intervene.backend import BackendConfig
from ..synthesize.diffusion import DiffusionConfig
from ..synthesize.render import RenderStyle

ENV_PREFIX = "CWMDT_"

DEFAULT_HORIZON = 16
DEFAULT_SAMPLES = 3
DEFAULT_EPSILON = 0.5
DEFAULT_THRESHOLD = 0.9
DEFAULT_FPS = 24


@dataclass(frozen=True)
class RunConfig:
    """Everything a counterfactual run needs beyond its input and query."""

    horizon: int = DEFAULT_HORIZON
    samples: int = DEFAULT_SAMPLES
    seed: int = 0
    epsilon: float = DEFAULT_EPSILON
    threshold: float = DEFAULT_THRESHOLD
    fps: int = DEFAULT_FPS
    scale: int = 1
    background: tuple = (0, 0, 0)
    intervene_backend: str = "deterministic"
    synthesize_backend: str = "deterministic"
    llm_endpoint: str | None = None
    llm_token: str | None = None
    llm_timeout: float = 10.0
    llm_retries: int = 0
    diffusion_endpoint: str | None = None
    diffusion_token: str | None = None
    diffusion_timeout: float = 30.0
    diffusion_retries: int = 0
    store_dir: str | None = None
    service_host: str = "127.0.0.1"
    service_port: int = 8787
    service_token: str | None = None
    service_workers: int = 4

    def __post_init__(self):
        if self.horizon < 0:
            raise ConfigurationError(f"horizon must be >= 0, got {self.horizon}")
        if self.samples < 1:
            raise ConfigurationError(f"samples must be >= 1, got {self.samples}")
        if not self.epsilon > 0:
            raise ConfigurationError(f"epsilon must be positive, got {self.epsilon}")
        if not 0.0 < self.threshold <= 1.0:
            raise ConfigurationError(
                f"threshold must be in (0, 1], got {self.threshold}"
            )
        if self.fps < 1:
            raise ConfigurationError(f"fps must be >= 1, got {self.fps}")
        if self.scale < 1:
            raise ConfigurationError(f"scale must be >= 1, got {self.scale}")
        if self.intervene_backend not in ("deterministic", "llm"):
            raise ConfigurationError(
                f"unknown intervene backend {self.intervene_backend!r}"
            )
        if self.synthesize_backend not in ("deterministic", "diffusion"):
            raise ConfigurationError(
                f"unknown synthesize backend {self.synthesize_backend!r}"
            )
        if self.service_workers < 1:
            raise ConfigurationError(
                f"service workers must be >= 1, got {self.service_workers}"
            )


# dotted config key -> (dataclass field, parser)

def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigurationError(f"expected an integer, got {text!r}") from None


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigurationError(f"expected a number, got {text!r}") from None


def _parse_str(text: str) -> str:
    return text


def parse_background(text: str) -> tuple:
    """Parse ``R,G,B`` with each channel in 0..255."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ConfigurationError(f"background must be R,G,B, got {text!r}")
    channels = tuple(_parse_int(p) for p in parts)
    for c in channels:
        if not 0 <= c <= 255:
            raise ConfigurationError(f"background channel {c} outside 0..255")
    return channels


KEYS = {
    "horizon": ("horizon", _parse_int),
    "samples": ("samples", _parse_int),
    "seed": ("seed", _parse_int),
    "epsilon": ("epsilon", _parse_float),
    "threshold": ("threshold", _parse_float),
    "fps": ("fps", _parse_int),
    "style.scale": ("scale", _parse_int),
    "style.background": ("background", parse_background),
    "backend.intervene": ("intervene_backend", _parse_str),
    "backend.synthesize": ("synthesize_backend", _parse_str),
    "llm.endpoint": ("llm_endpoint", _parse_str),
    "llm.token": ("llm_token", _parse_str),
    "llm.timeout": ("llm_timeout", _parse_float),
    "llm.retries": ("llm_retries", _parse_int),
    "diffusion.endpoint": ("diffusion_endpoint", _parse_str),
    "diffusion.token": ("diffusion_token", _parse_str),
    "diffusion.timeout": ("diffusion_timeout", _parse_float),
    "diffusion.retries": ("diffusion_retries", _parse_int),
    "store.dir": ("store_dir", _parse_str),
    "service.host": ("service_host", _parse_str),
    "service.port": ("service_port", _parse_int),
    "service.token": ("service_token", _parse_str),
    "service.workers": ("service_workers", _parse_int),
}

# Fields that define what a run computes.  Transport details (endpoints,
# tokens, timeouts) and the store/service wiring deliberately stay out so the
# same logical run hashes to the same id on any deployment.
CANONICAL_FIELDS = (
    "horizon",
    "samples",
    "seed",
    "epsilon",
    "threshold",
    "fps",
    "scale",
    "background",
    "intervene_backend",
    "synthesize_backend",
)


def env_name(key: str) -> str:
    return ENV_PREFIX + key.upper().replace(".", "_")


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines into a raw {dotted key: string} dict."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigurationError(f"line {lineno}: expected key = value")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in KEYS:
            raise ConfigurationError(f"line {lineno}: unknown config key {key!r}")
        raw[key] = value
    return raw


def load_config(path=None, env=None, overrides=None) -> RunConfig:
    """Build a RunConfig from defaults, an optional file, env, and overrides.

    ``overrides`` maps dataclass field names to already-typed values; it is
    applied last and is how CLI flags land.
    """
    env = os.environ if env is None else env
    values = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
        for key, raw in parse_config_text(text).items():
            field, parser = KEYS[key]
            values[field] = parser(raw)
    for key, (field, parser) in KEYS.items():
        raw = env.get(env_name(key))
        if raw is not None:
            values[field] = parser(raw)
    if overrides:
        valid = {f.name for f in fields(RunConfig)}
        for field, value in overrides.items():
            if field not in valid:
                raise ConfigurationError(f"unknown config field {field!r}")
            if value is not None:
                values[field] = value
    return RunConfig(**values)


def canonical_obj(config: RunConfig) -> dict:
    """The configuration subset that participates in run identity."""
    obj = {}
    for name in CANONICAL_FIELDS:
        value = getattr(config, name)
        obj[name] = list(value) if isinstance(value, tuple) else value
    return obj


def render_style(config: RunConfig) -> RenderStyle:
    return RenderStyle(background=config.background, scale=config.scale)


def intervene_config(config: RunConfig) -> BackendConfig:
    return BackendConfig(
        backend=config.intervene_backend,
        endpoint=config.llm_endpoint,
        token=config.llm_token,
        timeout=config.llm_timeout,
        retries=config.llm_retries,
        samples=config.samples,
        seed=config.seed,
    )


def diffusion_config(config: RunConfig) -> DiffusionConfig:
    return DiffusionConfig(
        backend=config.synthesize_backend,
        endpoint=config.diffusion_endpoint,
        token=config.diffusion_token,
        timeout=config.diffusion_timeout,
        retries=config.diffusion_retries,
    )


def with_overrides(config: RunConfig, **kwargs) -> RunConfig:
    """Return a copy with the given fields replaced (None values ignored)."""
    changes = {k: v for k, v in kwargs.items() if v is not None}
    return replace(config, **changes) if changes else config
