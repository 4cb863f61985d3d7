"""HTTP service contract: inputs, runs, artifacts, errors, auth."""

import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from cwmdt.pipeline.config import RunConfig
from cwmdt.pipeline.store import SessionStore
from cwmdt.service import create_app
from cwmdt.twin.codec import parse_twin
from cwmdt.video import decode_ppm, encode_ppm_stream

from conftest import sim_clip

SCENARIO = "seed = 1\n"


@pytest.fixture
def client(tmp_path):
    config = RunConfig(horizon=3)
    app = create_app(config, SessionStore(tmp_path / "store"))
    with TestClient(app) as tc:
        yield tc
    app.state.jobs.shutdown()


def wait_for(client, run_id, timeout=60.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        body = client.get(f"/runs/{run_id}").json()
        if body.get("status") in ("complete", "failed"):
            return body
        time.sleep(0.02)
    raise AssertionError(f"run {run_id} did not finish")


def start_run(client, intervention="NULL", **extra):
    created = client.post("/scenarios", json={"spec": SCENARIO}).json()
    body = {"scenario_id": created["scenario_id"], "intervention": intervention}
    body.update(extra)
    reply = client.post("/runs", json=body)
    assert reply.status_code == 200, reply.text
    return reply.json()


def test_scenario_upload(client):
    reply = client.post("/scenarios", json={"spec": SCENARIO})
    assert reply.status_code == 200
    scenario_id = reply.json()["scenario_id"]
    assert len(scenario_id) == 16

    # same text, same id
    again = client.post("/scenarios", json={"spec": SCENARIO})
    assert again.json()["scenario_id"] == scenario_id

    bad = client.post("/scenarios", json={"spec": "objects = banana\n"})
    assert bad.status_code == 400
    assert bad.json()["error"]["code"] == "TWIN_SCHEMA"


def test_video_upload_canonicalizes(client):
    _, video = sim_clip(2, 3)
    payload = encode_ppm_stream(video)
    reply = client.post("/videos", content=payload)
    assert reply.status_code == 200
    body = reply.json()
    assert body["frames"] == 4
    assert body["width"] == 64 and body["height"] == 64

    again = client.post("/videos", content=payload)
    assert again.json()["video_id"] == body["video_id"]

    junk = client.post("/videos", content=b"P3 nope")
    assert junk.status_code == 400
    assert junk.json()["error"]["code"] == "TWIN_SYNTAX"


def test_run_lifecycle(client):
    created = start_run(client)
    run_id = created["run_id"]
    assert created["status"] in ("pending", "running", "complete")

    status = wait_for(client, run_id)
    assert status["status"] == "complete"
    assert status["intervention"] == "NULL"
    assert status["at_frame"] == 0
    assert status["horizon"] == 3
    assert status["factual"]["frames"] == 4
    assert status["factual"]["twin_url"] == f"/runs/{run_id}/factual/twin"
    assert len(status["samples"]) == 3
    sample = status["samples"][0]
    assert sample["consistency"] == 1.0
    assert sample["metrics"]["intervention_success"] == 1.0
    assert sample["twin_url"].endswith("/twins/0")

    listed = client.get("/runs").json()["runs"]
    assert run_id in listed


def test_artifact_endpoints(client):
    run_id = start_run(client)["run_id"]
    wait_for(client, run_id)

    twin_text = client.get(f"/runs/{run_id}/twins/0")
    assert twin_text.status_code == 200
    twin = parse_twin(twin_text.text)
    assert twin.frame_range == (0, 3)

    factual = client.get(f"/runs/{run_id}/factual/twin")
    assert parse_twin(factual.text).frame_range == (0, 3)

    frame = client.get(f"/runs/{run_id}/videos/0/frames/0")
    assert frame.status_code == 200
    assert frame.headers["content-type"].startswith("image/x-portable-pixmap")
    decoded, _ = decode_ppm(frame.content)
    assert (decoded.width, decoded.height) == (64, 64)

    fact_frame = client.get(f"/runs/{run_id}/factual/frames/3")
    assert fact_frame.status_code == 200
    # the NULL counterfactual replays the factual pixels
    cf_frame = client.get(f"/runs/{run_id}/videos/0/frames/3")
    assert cf_frame.content == fact_frame.content


def test_not_found_codes(client):
    assert client.get("/runs/feedfacefeedface").json()["error"]["code"] == "RUN_NOT_FOUND"

    run_id = start_run(client)["run_id"]
    wait_for(client, run_id)
    missing_sample = client.get(f"/runs/{run_id}/twins/9")
    assert missing_sample.status_code == 404
    assert missing_sample.json()["error"]["code"] == "SAMPLE_NOT_FOUND"

    missing_frame = client.get(f"/runs/{run_id}/videos/0/frames/99")
    assert missing_frame.status_code == 404
    assert missing_frame.json()["error"]["code"] == "FRAME_NOT_FOUND"

    missing_fact = client.get(f"/runs/{run_id}/factual/frames/-1")
    assert missing_fact.status_code == 404

    unknown_scenario = client.post(
        "/runs", json={"scenario_id": "0" * 16, "intervention": "NULL"}
    )
    assert unknown_scenario.status_code == 404
    assert unknown_scenario.json()["error"]["code"] == "SCENARIO_NOT_FOUND"

    unknown_video = client.post(
        "/runs", json={"video_id": "0" * 16, "intervention": "NULL"}
    )
    assert unknown_video.json()["error"]["code"] == "VIDEO_NOT_FOUND"


def test_validation_error_shape(client):
    created = client.post("/scenarios", json={"spec": SCENARIO}).json()

    both = client.post(
        "/runs",
        json={
            "scenario_id": created["scenario_id"],
            "video_id": "0" * 16,
            "intervention": "NULL",
        },
    )
    assert both.status_code == 422
    error = both.json()["error"]
    assert error["code"] == "VALIDATION"
    assert "exactly one" in error["message"]

    neither = client.post("/runs", json={"intervention": "NULL"})
    assert neither.status_code == 422

    extra = client.post(
        "/runs",
        json={
            "scenario_id": created["scenario_id"],
            "intervention": "NULL",
            "shiny": True,
        },
    )
    assert extra.status_code == 422

    bad_patch = client.post(
        "/runs",
        json={
            "scenario_id": created["scenario_id"],
            "intervention": "NULL",
            "config": {"llm_endpoint": "http://x/"},
        },
    )
    assert bad_patch.status_code == 422


def test_failed_run_reports_stage_and_code(client):
    created = start_run(client, intervention="REMOVE id=99 AT t=0")
    status = wait_for(client, created["run_id"])
    assert status["status"] == "failed"
    assert status["error"]["code"] == "UNKNOWN_ID"
    assert status["error"]["stage"] == "intervene"

    # failed runs appear in the listing until deleted
    assert created["run_id"] in client.get("/runs").json()["runs"]
    deleted = client.delete(f"/runs/{created['run_id']}")
    assert deleted.status_code == 200


def test_malformed_intervention_fails_in_parse_stage(client):
    created = start_run(client, intervention="REMOVE id= AT t=0")
    status = wait_for(client, created["run_id"])
    assert status["status"] == "failed"
    assert status["error"]["code"] == "PARSE"
    assert status["error"]["stage"] == "parse"

    # free text without an llm backend is a configuration problem
    created = start_run(client, intervention="make the square vanish")
    status = wait_for(client, created["run_id"])
    assert status["error"]["code"] == "CONFIGURATION"


def test_duplicate_requests_share_one_run(client):
    first = start_run(client, config={"seed": 7})
    second = start_run(client, config={"seed": 7})
    assert first["run_id"] == second["run_id"]
    status = wait_for(client, first["run_id"])
    assert status["status"] == "complete"

    # after completion a repost answers "complete" without recomputing
    third = start_run(client, config={"seed": 7})
    assert third == {"run_id": first["run_id"], "status": "complete"}


def test_config_patch_changes_run_identity(client):
    base = start_run(client)
    patched = start_run(client, config={"horizon": 2})
    assert base["run_id"] != patched["run_id"]
    status = wait_for(client, patched["run_id"])
    assert status["horizon"] == 2
    assert status["factual"]["frames"] == 3


def test_concurrent_distinct_runs_complete_independently(client):
    a = start_run(client, intervention="NULL")
    b = start_run(client, intervention="REMOVE id=0 AT t=0")
    assert a["run_id"] != b["run_id"]
    status_a = wait_for(client, a["run_id"])
    status_b = wait_for(client, b["run_id"])
    assert status_a["status"] == "complete"
    assert status_b["status"] == "complete"
    # artifacts do not bleed between runs
    fa = client.get(f"/runs/{a['run_id']}/videos/0/frames/1").content
    fb = client.get(f"/runs/{b['run_id']}/videos/0/frames/1").content
    assert fa != fb


def test_delete_run(client):
    run_id = start_run(client)["run_id"]
    wait_for(client, run_id)
    reply = client.delete(f"/runs/{run_id}")
    assert reply.json() == {"deleted": run_id}
    assert client.get(f"/runs/{run_id}").status_code == 404
    assert client.delete(f"/runs/{run_id}").status_code == 404

    missing = client.delete("/runs/feedfacefeedface")
    assert missing.status_code == 404


def test_delete_refuses_active_runs(client):
    # pin an in-flight entry; the worker pool never sees this synthetic id
    run_id = "aaaabbbbccccdddd"
    client.app.state.jobs.entries[run_id] = {
        "status": "running", "stage": "perceive", "error": None,
        "intervention": "NULL",
    }
    reply = client.delete(f"/runs/{run_id}")
    assert reply.status_code == 409
    assert reply.json()["error"]["code"] == "RUN_ACTIVE"

    status = client.get(f"/runs/{run_id}").json()
    assert status["status"] == "running"
    assert status["stage"] == "perceive"

    client.app.state.jobs.entries[run_id]["status"] = "failed"
    assert client.delete(f"/runs/{run_id}").status_code == 200


def test_bearer_auth(tmp_path):
    config = RunConfig(horizon=2, service_token="hunter2")
    app = create_app(config, SessionStore(tmp_path / "store"))
    with TestClient(app) as tc:
        denied = tc.post("/scenarios", json={"spec": SCENARIO})
        assert denied.status_code == 401
        assert denied.json()["error"]["code"] == "UNAUTHORIZED"
        assert tc.get("/runs").status_code == 401
        assert tc.get("/runs/feedfacefeedface").status_code == 401

        wrong = tc.get("/runs", headers={"Authorization": "Bearer nope"})
        assert wrong.status_code == 401

        ok = tc.get("/runs", headers={"Authorization": "Bearer hunter2"})
        assert ok.status_code == 200
        assert ok.json() == {"runs": []}
    app.state.jobs.shutdown()


def test_cross_origin_browser_client(client):
    # a page served from another origin must be able to call the API
    browsing = client.get("/runs", headers={"Origin": "http://localhost:8000"})
    assert browsing.status_code == 200
    assert browsing.headers["access-control-allow-origin"] == "*"

    preflight = client.options(
        "/runs",
        headers={
            "Origin": "http://localhost:8000",
            "Access-Control-Request-Method": "POST",
            "Access-Control-Request-Headers": "content-type,authorization",
        },
    )
    assert preflight.status_code == 200
    assert preflight.headers["access-control-allow-origin"] == "*"
    allowed = preflight.headers["access-control-allow-headers"].lower()
    assert "content-type" in allowed and "authorization" in allowed
