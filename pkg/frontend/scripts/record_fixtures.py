"""Record service fixtures for the explorer's contract tests.

Drives the real service in-process and captures request/response pairs,
twin documents, and frame bytes into tests/fixtures/. Rerun after any
service change:

    python3 scripts/record_fixtures.py
"""

import json
import re
import tempfile
import time
from pathlib import Path

from fastapi.testclient import TestClient

from cwmdt.errors import ParseError, UnknownKeyword
from cwmdt.intervene.dsl import parse_intervention
from cwmdt.pipeline.config import RunConfig
from cwmdt.pipeline.store import SessionStore
from cwmdt.service.app import create_app

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

SCENARIO_SPEC = "seed = 5\n"
REMOVE_TEXT = "REMOVE id=3 AT t=0"
FREE_TEXT = "make the red object vanish"
HORIZON = 6

DSL_CASES = [
    "",
    "   ",
    "NULL",
    "NULL AT t=2",
    "REMOVE id=3 AT t=0",
    "REMOVE id=007 AT t=0",
    "  REMOVE   id = 3   AT t=0  ",
    "REMOVE id= AT t=0",
    "REMOVE id=-1 AT t=0",
    "REMOVE id=1",
    "REMOVE id=1 AT t=0 extra",
    "REMOVE id=1 AT t=2 FOR 3",
    'REPLACE id=1 WITH "green circle 6x6" AT t=2',
    'REPLACE id=1 WITH "green hexagon" AT t=2',
    'REPLACE id=1 WITH "" AT t=0',
    'REPLACE id=1 WITH "green AT t=0',
    "SET id=2 velocity=(1.5,-0.5) AT t=3",
    "SET id=1 velocity=(+1.5,2) AT t=0",
    "SET id=2 velocity=(1.5) AT t=3",
    "SET id=1 velocity=(1.,2) AT t=0",
    'SET id=0 attributes="blue rectangle 8x4" AT t=1',
    "SET id=2 position=(1,2) AT t=0",
    "FREEZE id=1 AT t=2 FOR 8",
    "FREEZE id=1 AT t=2 FOR 0",
    "FREEZE id=1 AT t=2 FOR -2",
    "remove id=1 AT t=0",
    "make the red object vanish",
    "What happens if the red ball vanishes?",
    "83 bottles",
]

_OFFSET_SUFFIX = re.compile(r" \(at offset \d+\)$")


def dsl_case(text):
    """Classify text the way the run pipeline does."""
    try:
        parsed = parse_intervention(text)
    except UnknownKeyword:
        return {"text": text, "outcome": "free-text"}
    except ParseError as exc:
        return {
            "text": text,
            "outcome": "error",
            "message": _OFFSET_SUFFIX.sub("", str(exc)),
            "offset": exc.offset,
        }
    return {
        "text": text,
        "outcome": "command",
        "kind": parsed.kind,
        "target_id": parsed.target_id,
        "at_frame": parsed.at_frame,
        "duration": parsed.duration,
        "velocity": list(parsed.velocity) if parsed.velocity else None,
        "attributes": parsed.attributes,
    }


def wait_for(client, run_id, timeout=120.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        status = client.get(f"/runs/{run_id}").json()
        if status["status"] in ("complete", "failed"):
            return status
        time.sleep(0.2)
    raise RuntimeError(f"run {run_id} did not finish")


def exchange(response, request_body=None):
    entry = {"status": response.status_code, "response": response.json()}
    if request_body is not None:
        entry["request"] = request_body
    return entry


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    (FIXTURES / "frames").mkdir(exist_ok=True)
    (FIXTURES / "twins").mkdir(exist_ok=True)

    app = create_app(RunConfig(), SessionStore(tempfile.mkdtemp(prefix="fixture-store-")))
    manifest = {}
    with TestClient(app) as client:
        # source upload, good and bad
        body = {"spec": SCENARIO_SPEC}
        reply = client.post("/scenarios", json=body)
        manifest["scenario"] = exchange(reply, body)
        scenario_id = reply.json()["scenario_id"]
        bad = {"spec": "objects = banana\n"}
        manifest["scenario_bad"] = exchange(client.post("/scenarios", json=bad), bad)

        # DSL command run, recorded end to end
        run_body = {
            "scenario_id": scenario_id,
            "intervention": REMOVE_TEXT,
            "config": {"horizon": HORIZON},
        }
        created = client.post("/runs", json=run_body)
        run_id = created.json()["run_id"]
        status = wait_for(client, run_id)
        assert status["status"] == "complete", status
        manifest["run_remove"] = {
            "request": run_body,
            "created": exchange(created),
            "status": status,
        }

        text = client.get(f"/runs/{run_id}/factual/twin").text
        (FIXTURES / "twins" / "factual.json").write_text(text)
        for sample in status["samples"]:
            n = sample["index"]
            text = client.get(f"/runs/{run_id}/twins/{n}").text
            (FIXTURES / "twins" / f"sample_{n}.json").write_text(text)

        factual = status["factual"]
        for t in range(factual["frames"]):
            data = client.get(f"{factual['frames_url']}/{t}").content
            (FIXTURES / "frames" / f"factual_{t}.ppm").write_bytes(data)
        sample_streams = {}
        for sample in status["samples"]:
            n = sample["index"]
            chunks = []
            for t in range(sample["frames"]):
                data = client.get(f"{sample['frames_url']}/{t}").content
                (FIXTURES / "frames" / f"sample_{n}_{t}.ppm").write_bytes(data)
                chunks.append(data)
            sample_streams[n] = b"".join(chunks)

        # forked source: sample 0's clip re-uploaded as a video
        stream = sample_streams[0]
        (FIXTURES / "sample_0_stream.ppm").write_bytes(stream)
        reply = client.post(
            "/videos", content=stream, headers={"content-type": "application/octet-stream"}
        )
        manifest["video_upload"] = {
            "stream": "sample_0_stream.ppm",
            "status": reply.status_code,
            "response": reply.json(),
        }

        # free-text run: accepted by the schema, fails without a language backend
        free_body = {"scenario_id": scenario_id, "intervention": FREE_TEXT}
        created = client.post("/runs", json=free_body)
        failed = wait_for(client, created.json()["run_id"])
        assert failed["status"] == "failed", failed
        manifest["run_freetext"] = {
            "request": free_body,
            "created": exchange(created),
            "status": failed,
        }

        # error shapes the client must surface
        manifest["errors"] = {
            "run_not_found": exchange(client.get("/runs/" + "0" * 16)),
            "both_sources": exchange(
                client.post(
                    "/runs",
                    json={
                        "scenario_id": scenario_id,
                        "video_id": "feedfacefeedface",
                        "intervention": "NULL",
                    },
                )
            ),
            "no_sources": exchange(client.post("/runs", json={"intervention": "NULL"})),
            "unknown_config_key": exchange(
                client.post(
                    "/runs",
                    json={
                        "scenario_id": scenario_id,
                        "intervention": "NULL",
                        "config": {"llm_endpoint": "http://example.invalid"},
                    },
                )
            ),
        }

        run_list = client.get("/runs")
        manifest["run_list"] = exchange(run_list)

    (FIXTURES / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    cases = [dsl_case(text) for text in DSL_CASES]
    (FIXTURES / "dsl_cases.json").write_text(json.dumps(cases, indent=2))
    print(f"wrote fixtures for run {run_id} to {FIXTURES}")


if __name__ == "__main__":
    main()
