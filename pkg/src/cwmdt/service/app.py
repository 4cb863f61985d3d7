"""HTTP service exposing the run pipeline and its artifact store.

Endpoints:

    POST   /scenarios                      {"spec": text} -> {"scenario_id"}
    POST   /videos                         raw PPM stream -> {"video_id", ...}
    POST   /runs                           {"scenario_id"|"video_id",
                                            "intervention", "config"?}
    GET    /runs                           {"runs": [run ids]}
    GET    /runs/{run}                     status, reports, artifact links
    GET    /runs/{run}/twins/{n}           twin document (text)
    GET    /runs/{run}/videos/{n}/frames/{t}   single frame, P6 PPM bytes
    GET    /runs/{run}/factual/twin        perceived factual twin (text)
    GET    /runs/{run}/factual/frames/{t}  factual frame, P6 PPM bytes
    DELETE /runs/{run}                     {"deleted": run_id}

Runs execute on a bounded worker pool; posting an already-stored or
in-flight request returns its existing run id instead of recomputing.
Frame indices are zero-based within the returned clip. All errors share
the {"error": {"code", "message", "stage"}} body.
"""

from __future__ import annotations

import tempfile
import threading
from concurrent.futures import ThreadPoolExecutor

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..errors import ConsistencyRejected, EngineError, StageError
from ..pipeline.config import RunConfig, with_overrides
from ..pipeline.runner import compute_run_id, run_counterfactual
from ..pipeline.store import SessionStore, blob_hash
from ..sim.world import parse_scenario_file
from ..video import decode_ppm_stream, encode_ppm, encode_ppm_stream
from .schemas import (
    DeleteReply,
    ErrorInfo,
    FactualStatus,
    RunCreated,
    RunList,
    RunRequest,
    RunStatus,
    SampleMetrics,
    SampleStatus,
    ScenarioCreated,
    ScenarioRequest,
    VideoCreated,
)

PPM_MEDIA_TYPE = "image/x-portable-pixmap"


def _http_error(status: int, code: str, message: str, stage=None):
    return HTTPException(
        status_code=status,
        detail={"code": code, "message": message, "stage": stage},
    )


class _Jobs:
    """In-flight run bookkeeping; completed runs live in the store."""

    def __init__(self, workers: int):
        self.lock = threading.Lock()
        self.entries: dict[str, dict] = {}
        self.pool = ThreadPoolExecutor(max_workers=workers)

    def shutdown(self):
        self.pool.shutdown(wait=True)


def create_app(config: RunConfig, store: SessionStore | None = None) -> FastAPI:
    if store is None:
        root = config.store_dir or tempfile.mkdtemp(prefix="cwmdt-store-")
        store = SessionStore(root)

    app = FastAPI(title="counterfactual world-model service", docs_url=None)
    # the browser client is served as static files from wherever; let any
    # origin talk to the API (auth, if configured, still applies)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.config = config
    app.state.store = store
    app.state.scenarios: dict[str, str] = {}
    app.state.videos: dict[str, bytes] = {}
    app.state.jobs = _Jobs(config.service_workers)

    @app.exception_handler(HTTPException)
    async def _on_http_error(request: Request, exc: HTTPException):
        detail = exc.detail
        if not isinstance(detail, dict):
            detail = {"code": "HTTP_ERROR", "message": str(detail), "stage": None}
        return JSONResponse(status_code=exc.status_code, content={"error": detail})

    @app.exception_handler(RequestValidationError)
    async def _on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={
                "error": {
                    "code": "VALIDATION",
                    "message": "; ".join(
                        f"{'.'.join(str(p) for p in e['loc'])}: {e['msg']}"
                        for e in exc.errors()
                    ),
                    "stage": None,
                }
            },
        )

    def require_auth(request: Request):
        token = config.service_token
        if not token:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise _http_error(401, "UNAUTHORIZED", "missing or invalid bearer token")

    # --- inputs ---

    @app.post("/scenarios", response_model=ScenarioCreated)
    def post_scenario(body: ScenarioRequest, request: Request):
        require_auth(request)
        try:
            parse_scenario_file(body.spec)
        except EngineError as exc:
            raise _http_error(400, exc.code, str(exc))
        scenario_id = blob_hash(body.spec.encode("utf-8"))[:16]
        app.state.scenarios[scenario_id] = body.spec
        store.put_blob(body.spec.encode("utf-8"))
        return ScenarioCreated(scenario_id=scenario_id)

    @app.post("/videos", response_model=VideoCreated)
    async def post_video(request: Request):
        require_auth(request)
        data = await request.body()
        try:
            video = decode_ppm_stream(data)
        except EngineError as exc:
            raise _http_error(400, exc.code, str(exc))
        canonical = encode_ppm_stream(video)
        video_id = blob_hash(canonical)[:16]
        app.state.videos[video_id] = canonical
        store.put_blob(canonical)
        return VideoCreated(
            video_id=video_id,
            frames=len(video.frames),
            width=video.width,
            height=video.height,
        )

    # --- runs ---

    def resolve_source(body: RunRequest):
        if body.scenario_id is not None:
            text = app.state.scenarios.get(body.scenario_id)
            if text is None:
                raise _http_error(
                    404, "SCENARIO_NOT_FOUND", f"unknown scenario {body.scenario_id}"
                )
            return parse_scenario_file(text)
        data = app.state.videos.get(body.video_id)
        if data is None:
            raise _http_error(404, "VIDEO_NOT_FOUND", f"unknown video {body.video_id}")
        return decode_ppm_stream(data)

    def merged_config(body: RunRequest) -> RunConfig:
        if body.config is None:
            return config
        try:
            return with_overrides(config, **body.config.model_dump())
        except EngineError as exc:
            raise _http_error(400, exc.code, str(exc))

    def execute(run_id: str, source, intervention: str, run_config: RunConfig):
        jobs = app.state.jobs

        def progress(stage: str):
            with jobs.lock:
                entry = jobs.entries.get(run_id)
                if entry is not None:
                    entry["stage"] = stage

        try:
            with jobs.lock:
                jobs.entries[run_id]["status"] = "running"
            run_counterfactual(
                source, intervention, run_config, store=store, progress=progress
            )
            with jobs.lock:
                jobs.entries[run_id]["status"] = "complete"
        except EngineError as exc:
            stage = exc.stage if isinstance(exc, StageError) else None
            cause = exc.cause if isinstance(exc, StageError) else exc
            code = getattr(cause, "code", "ENGINE_ERROR")
            if isinstance(exc, ConsistencyRejected):
                stage = "synthesize"
            with jobs.lock:
                entry = jobs.entries[run_id]
                entry["status"] = "failed"
                entry["error"] = {
                    "code": code,
                    "message": str(cause),
                    "stage": stage,
                }
        except Exception as exc:  # defensive: surface bugs as failed runs
            with jobs.lock:
                entry = jobs.entries[run_id]
                entry["status"] = "failed"
                entry["error"] = {
                    "code": "INTERNAL",
                    "message": f"{type(exc).__name__}: {exc}",
                    "stage": None,
                }

    @app.post("/runs", response_model=RunCreated)
    def post_run(body: RunRequest, request: Request):
        require_auth(request)
        source = resolve_source(body)
        run_config = merged_config(body)
        run_id = compute_run_id(source, body.intervention, run_config)
        jobs = app.state.jobs
        with jobs.lock:
            if store.has_run(run_id):
                return RunCreated(run_id=run_id, status="complete")
            entry = jobs.entries.get(run_id)
            if entry is not None and entry["status"] in ("pending", "running"):
                return RunCreated(run_id=run_id, status=entry["status"])
            jobs.entries[run_id] = {
                "status": "pending",
                "stage": None,
                "error": None,
                "intervention": body.intervention,
            }
            jobs.pool.submit(execute, run_id, source, body.intervention, run_config)
        return RunCreated(run_id=run_id, status="pending")

    def load_manifest(run_id: str) -> dict:
        if not store.has_run(run_id):
            raise _http_error(404, "RUN_NOT_FOUND", f"unknown run {run_id}")
        return store.get_manifest(run_id)

    def status_from_manifest(run_id: str, manifest: dict) -> RunStatus:
        samples = [
            SampleStatus(
                index=entry["index"],
                provenance=entry["provenance"],
                frames=entry["frames"],
                consistency=entry["consistency"],
                metrics=SampleMetrics(**entry["metrics"]),
                twin_url=f"/runs/{run_id}/twins/{entry['index']}",
                frames_url=f"/runs/{run_id}/videos/{entry['index']}/frames",
            )
            for entry in manifest["samples"]
        ]
        return RunStatus(
            run_id=run_id,
            status="complete",
            intervention=manifest["request"]["intervention"],
            at_frame=manifest["at_frame"],
            horizon=manifest["horizon"],
            fps=manifest["fps"],
            width=manifest["width"],
            height=manifest["height"],
            factual=FactualStatus(
                frames=manifest["factual"]["frames"],
                twin_url=f"/runs/{run_id}/factual/twin",
                frames_url=f"/runs/{run_id}/factual/frames",
            ),
            samples=samples,
            warnings=manifest.get("warnings", []),
        )

    @app.get("/runs", response_model=RunList)
    def list_runs(request: Request):
        require_auth(request)
        jobs = app.state.jobs
        with jobs.lock:
            pending = [
                run_id
                for run_id, entry in jobs.entries.items()
                if entry["status"] in ("pending", "running", "failed")
            ]
        return RunList(runs=sorted(set(store.list_runs()) | set(pending)))

    @app.get("/runs/{run_id}", response_model=RunStatus)
    def get_run(run_id: str, request: Request):
        require_auth(request)
        if store.has_run(run_id):
            return status_from_manifest(run_id, store.get_manifest(run_id))
        jobs = app.state.jobs
        with jobs.lock:
            entry = jobs.entries.get(run_id)
            snapshot = dict(entry) if entry is not None else None
        if snapshot is None:
            raise _http_error(404, "RUN_NOT_FOUND", f"unknown run {run_id}")
        if snapshot["status"] == "complete" and store.has_run(run_id):
            return status_from_manifest(run_id, store.get_manifest(run_id))
        error = snapshot["error"]
        return RunStatus(
            run_id=run_id,
            status=snapshot["status"] if snapshot["status"] != "complete" else "running",
            stage=snapshot["stage"],
            intervention=snapshot.get("intervention"),
            error=ErrorInfo(**error) if error else None,
        )

    # --- artifacts ---

    def sample_entry(run_id: str, index: int) -> dict:
        manifest = load_manifest(run_id)
        for entry in manifest["samples"]:
            if entry["index"] == index:
                return entry
        raise _http_error(
            404, "SAMPLE_NOT_FOUND", f"run {run_id} has no sample {index}"
        )

    def frame_bytes(video_blob: str, index: int, what: str) -> bytes:
        video = decode_ppm_stream(store.get_blob(video_blob))
        if not 0 <= index < len(video.frames):
            raise _http_error(
                404, "FRAME_NOT_FOUND", f"{what} has no frame {index}"
            )
        return encode_ppm(video.frames[index])

    @app.get("/runs/{run_id}/twins/{index}")
    def get_twin(run_id: str, index: int, request: Request):
        require_auth(request)
        entry = sample_entry(run_id, index)
        return Response(
            content=store.get_blob(entry["twin"]), media_type="text/plain"
        )

    @app.get("/runs/{run_id}/videos/{index}/frames/{frame}")
    def get_frame(run_id: str, index: int, frame: int, request: Request):
        require_auth(request)
        entry = sample_entry(run_id, index)
        body = frame_bytes(entry["video"], frame, f"sample {index}")
        return Response(content=body, media_type=PPM_MEDIA_TYPE)

    @app.get("/runs/{run_id}/factual/twin")
    def get_factual_twin(run_id: str, request: Request):
        require_auth(request)
        manifest = load_manifest(run_id)
        return Response(
            content=store.get_blob(manifest["factual"]["twin"]),
            media_type="text/plain",
        )

    @app.get("/runs/{run_id}/factual/frames/{frame}")
    def get_factual_frame(run_id: str, frame: int, request: Request):
        require_auth(request)
        manifest = load_manifest(run_id)
        body = frame_bytes(manifest["factual"]["video"], frame, "factual clip")
        return Response(content=body, media_type=PPM_MEDIA_TYPE)

    @app.delete("/runs/{run_id}", response_model=DeleteReply)
    def delete_run(run_id: str, request: Request):
        require_auth(request)
        jobs = app.state.jobs
        with jobs.lock:
            entry = jobs.entries.get(run_id)
            if entry is not None and entry["status"] in ("pending", "running"):
                raise _http_error(
                    409, "RUN_ACTIVE", f"run {run_id} is still executing"
                )
            jobs.entries.pop(run_id, None)
        if store.has_run(run_id):
            try:
                store.delete_run(run_id)
            except EngineError as exc:
                raise _http_error(404, "RUN_NOT_FOUND", str(exc))
            return DeleteReply(deleted=run_id)
        if entry is not None:
            return DeleteReply(deleted=run_id)
        raise _http_error(404, "RUN_NOT_FOUND", f"unknown run {run_id}")

    return app


def serve(config: RunConfig, store: SessionStore | None = None):
    """Run the service until interrupted. Raises BindError if the port is taken."""
    import uvicorn

    from ..errors import BindError

    app = create_app(config, store)
    try:
        uvicorn.run(app, host=config.service_host, port=config.service_port)
    except OSError as exc:
        raise BindError(
            f"cannot bind {config.service_host}:{config.service_port}: {exc}"
        ) from exc
