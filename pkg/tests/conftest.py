"""Shared fixtures: simulated clips, twins, and loopback backend stubs."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest

from cwmdt.perception.perceive import perceive
from cwmdt.sim.groundtruth import groundtruth_twin
from cwmdt.sim.render import render_states
from cwmdt.sim.world import ScenarioSpec, generate_scenario, simulate
from cwmdt.video import Frame


def sim_clip(seed: int, k: int):
    """(states, video) for a default-sized scenario."""
    states = simulate(generate_scenario(ScenarioSpec(seed=seed)), k)
    return states, render_states(states)


def gt_twin(seed: int, k: int):
    states = simulate(generate_scenario(ScenarioSpec(seed=seed)), k)
    return groundtruth_twin(states), states


def perceived_twin(seed: int, k: int):
    _, video = sim_clip(seed, k)
    return perceive(video)


def constant_gaps(trace, first: int, t: int, gaps: int = 3) -> bool:
    """True when the last `gaps` centroid steps ending at frame t are equal.

    Gaps are re-quantized before comparing: positions sit on the 4-digit
    grid, so equal quantized steps mean the window saw no reflection and
    the telescoped velocity estimate lands exactly on the stored value.
    """
    from cwmdt.quantize import round4

    if t - first < gaps:
        return False
    pts = [trace[t - first - i] for i in range(gaps + 1)]
    dx0 = round4(pts[0][0] - pts[1][0])
    dy0 = round4(pts[0][1] - pts[1][1])
    for i in range(1, gaps):
        if round4(pts[i][0] - pts[i + 1][0]) != dx0:
            return False
        if round4(pts[i][1] - pts[i + 1][1]) != dy0:
            return False
    return True


def clean_frame(twin, lo: int, hi: int):
    """First frame in [lo, hi] where every element has a clean 3-gap window."""
    for t in range(lo, hi + 1):
        ok = True
        for el in twin.major_elements:
            trace = tuple(
                (r.spatial.x, r.spatial.y) for r in el.records
            )
            if not constant_gaps(trace, el.first_frame, t):
                ok = False
                break
        if ok:
            return t
    return None


def frame_from(arr) -> Frame:
    return Frame.from_array(np.asarray(arr, dtype=np.uint8))


def synth_record(
    object_id,
    frame,
    x,
    y,
    z=0.0,
    w=4,
    h=4,
    category="rectangle",
    color="red",
    grid=(16, 16),
):
    """A record whose mask is the exact rasterization of its spatial props."""
    from cwmdt.raster import rasterize
    from cwmdt.twin.model import make_record

    mask = rasterize(category, x, y, w, h, grid[0], grid[1])
    return make_record(
        object_id, category, f"{color} {category}", frame, x, y, z, w, h, mask
    )


def synth_twin(traces, grid=(16, 16), first=0, **per_id):
    """Twin from {id: [(frame, x, y), ...]}; per_id maps id -> kwargs."""
    from cwmdt.twin.model import build_element, build_twin, require_valid

    elements = []
    for object_id, points in sorted(traces.items()):
        kwargs = per_id.get(f"kw{object_id}", {})
        records = [
            synth_record(object_id, f, x, y, grid=grid, **kwargs)
            for f, x, y in points
        ]
        captions = [f"object {object_id}" for _ in records]
        elements.append(
            build_element(
                object_id,
                records[0].category,
                records[0].attributes,
                records,
                captions,
            )
        )
    frames = [r.frame for el in elements for r in el.records]
    twin = build_twin(
        "synthetic scene",
        "synthetic motion",
        (min(frames), max(frames)),
        elements,
    )
    return require_valid(twin)


def random_frame(rng, width=64, height=64) -> Frame:
    return frame_from(rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8))


class StubServer:
    """Loopback HTTP stub; `handler` maps (headers, body) -> (status, bytes)."""

    def __init__(self, handler):
        outer = self

        class _Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = self.rfile.read(length)
                outer.requests.append((dict(self.headers), body))
                status, reply = handler(dict(self.headers), body)
                self.send_response(status)
                self.send_header("Content-Length", str(len(reply)))
                self.end_headers()
                self.wfile.write(reply)

            def log_message(self, *args):
                pass

        self.requests = []
        self._server = HTTPServer(("127.0.0.1", 0), _Handler)
        self._thread = threading.Thread(
            target=self._server.serve_forever, daemon=True
        )
        self._thread.start()

    @property
    def url(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}/"

    def close(self):
        self._server.shutdown()
        self._server.server_close()


@pytest.fixture
def stub_server():
    servers = []

    def make(handler) -> StubServer:
        server = StubServer(handler)
        servers.append(server)
        return server

    yield make
    for server in servers:
        server.close()


def echo_llm_handler(headers, body):
    doc = json.loads(body)
    return 200, json.dumps({"condensed_twin": doc["condensed_twin"]}).encode()


def parse_multipart(headers, body):
    """Crude multipart split good enough for the diffusion stub."""
    boundary = headers["Content-Type"].split("boundary=")[1].encode()
    fields = {}
    for part in body.split(b"--" + boundary):
        if b"\r\n\r\n" not in part:
            continue
        head, payload = part.split(b"\r\n\r\n", 1)
        for token in head.split(b";"):
            token = token.strip()
            if token.startswith(b'name="'):
                name = token[6:-1].decode()
                fields[name] = payload.rstrip(b"\r\n")
    return fields
