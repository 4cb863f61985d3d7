"""HTTP client for the external language-model editing backend.

Wire contract: POST to the configured endpoint with body
{"condensed_twin": <object>, "query": <text>, "schema": "condensed_twin/1"};
the service replies {"condensed_twin": <object>}. A malformed reply earns
exactly one repair round-trip whose body additionally carries
{"repair": {"violations": [<messages>]}}; a second malformed reply is
InvalidReply. Connection and HTTP failures are retried up to the
configured budget and then surface as TransportError; timeouts exhaust
the time budget and surface as BudgetExceeded.
"""

from __future__ import annotations

import json

import httpx

from ..errors import (
    BudgetExceeded,
    ConfigurationError,
    EngineError,
    InvalidReply,
    TransportError,
)
from ..twin.condense import CondensedTwin, condensed_to_obj, parse_condensed_obj
from .backend import BackendConfig

SCHEMA_NAME = "condensed_twin/1"


def _post(config: BackendConfig, body: dict) -> dict:
    headers = {}
    if config.token:
        headers["Authorization"] = f"Bearer {config.token}"
    last: Exception | None = None
    for _ in range(config.retries + 1):
        try:
            reply = httpx.post(
                config.endpoint, json=body, headers=headers, timeout=config.timeout
            )
        except httpx.TimeoutException as exc:
            raise BudgetExceeded(f"backend timed out after {config.timeout}s") from exc
        except httpx.HTTPError as exc:
            last = exc
            continue
        if reply.status_code != 200:
            last = TransportError(f"backend returned HTTP {reply.status_code}")
            continue
        try:
            return reply.json()
        except json.JSONDecodeError as exc:
            raise InvalidReply(f"backend reply is not JSON: {exc}") from None
    raise TransportError(f"backend unreachable: {last}")


def _extract(reply: dict) -> CondensedTwin:
    if not isinstance(reply, dict) or "condensed_twin" not in reply:
        raise InvalidReply("reply missing 'condensed_twin'")
    return parse_condensed_obj(reply["condensed_twin"])


def llm_edit(
    condensed: CondensedTwin, query: str, config: BackendConfig
) -> CondensedTwin:
    """Ask the external service to apply a natural-language intervention."""
    if not config.endpoint:
        raise ConfigurationError("llm backend requires llm.endpoint")
    body = {
        "condensed_twin": condensed_to_obj(condensed),
        "query": query,
        "schema": SCHEMA_NAME,
    }
    try:
        return _extract(_post(config, body))
    except (TransportError, BudgetExceeded):
        raise
    except EngineError as first:
        repair = dict(body)
        repair["repair"] = {"violations": [str(first)]}
        try:
            return _extract(_post(config, repair))
        except (TransportError, BudgetExceeded):
            raise
        except EngineError as second:
            raise InvalidReply(
                f"reply invalid after one repair attempt: {second}"
            ) from None
