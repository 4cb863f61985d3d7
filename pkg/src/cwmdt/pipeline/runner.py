"""End-to-end counterfactual runs: perceive, intervene, synthesize, evaluate.

``run_counterfactual`` drives the whole chain for one input and one
intervention. Each stage's domain errors are wrapped in StageError carrying
the stage name; ConsistencyRejected passes through unwrapped because callers
treat a rejected edit as a first-class outcome rather than a malfunction.

Run identity: ``compute_run_id`` hashes the canonical request (input
descriptor, intervention text, and the reproducibility-relevant config
subset). Wall-clock timings live in a sidecar and never enter the hash, so
re-running the same request always lands on the same run id.

Scale handling: perception, editing, consistency checks, and all metrics
operate at one pixel per grid cell. A configured ``scale`` above 1 only
enlarges the stored and returned videos by pixel repetition afterwards.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field

import numpy as np

from ..errors import (
    ConfigurationError,
    ConsistencyRejected,
    EngineError,
    ParseError,
    StageError,
    UnknownKeyword,
)
from ..intervene.dsl import NULL_INTERVENTION, Intervention, parse_intervention
from ..intervene.llm import llm_edit
from ..intervene.propagate import CounterfactualTwin
from ..intervene.sampling import sample_trajectories
from ..metrics.report import (
    EvalReport,
    evaluate_sample,
    parse_frame_scores,
    parse_report,
)
from ..perception.perceive import perceive
from ..sim.render import render_states
from ..sim.world import ScenarioSpec, generate_scenario, simulate
from ..synthesize.consistency import check_consistency
from ..synthesize.diffusion import SynthesisRequest, diffusion_synthesize
from ..synthesize.edit import edit_first_frame
from ..synthesize.render import RenderStyle, render_video
from ..twin.codec import parse_twin, serialize_twin
from ..twin.condense import condense, expand
from ..twin.model import TwinSequence
from ..video import Frame, Video, decode_ppm_stream, encode_ppm_stream
from .config import (
    RunConfig,
    canonical_obj,
    diffusion_config,
    intervene_config,
)
from .store import SessionStore, blob_hash

MANIFEST_SCHEMA = "run/1"

SIM_BACKGROUND = (0, 0, 0)


@dataclass
class RunResult:
    """Everything a completed run produced, plus the persisted manifest."""

    run_id: str
    config: RunConfig
    intervention_text: str
    intervention: Intervention | None
    at_frame: int
    factual_twin: TwinSequence
    factual_video: Video
    samples: list[CounterfactualTwin]
    videos: list[Video]
    reports: list[EvalReport]
    consistency: list[float]
    warnings: list[str] = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    manifest: dict | None = None


def input_descriptor(source) -> dict:
    """Canonical description of a run input for hashing and manifests."""
    if isinstance(source, ScenarioSpec):
        return {
            "kind": "scenario",
            "seed": source.seed,
            "width": source.width,
            "height": source.height,
            "min_objects": source.min_objects,
            "max_objects": source.max_objects,
            "min_size": source.min_size,
            "max_size": source.max_size,
            "min_speed": source.min_speed,
            "max_speed": source.max_speed,
        }
    if isinstance(source, Video):
        return {"kind": "video", "sha256": blob_hash(encode_ppm_stream(source))}
    raise ConfigurationError(f"unsupported run input {type(source).__name__}")


def canonical_request(source, intervention_text: str, config: RunConfig) -> dict:
    return {
        "input": input_descriptor(source),
        "intervention": intervention_text,
        "config": canonical_obj(config),
    }


def compute_run_id(source, intervention_text: str, config: RunConfig) -> str:
    body = json.dumps(
        canonical_request(source, intervention_text, config),
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(body.encode("utf-8")).hexdigest()[:16]


def _scaled_video(video: Video, scale: int) -> Video:
    if scale <= 1:
        return video
    frames = []
    for f in video.frames:
        arr = f.to_array()
        arr = np.repeat(np.repeat(arr, scale, axis=0), scale, axis=1)
        frames.append(Frame.from_array(arr))
    return Video(frames=tuple(frames), fps=video.fps)


class _Stages:
    """Tracks the current stage, wraps its domain errors, records timings."""

    def __init__(self, progress=None):
        self.timings = {}
        self._progress = progress

    def run(self, name: str, fn):
        if self._progress is not None:
            self._progress(name)
        started = time.perf_counter()
        try:
            return fn()
        except (ConsistencyRejected, StageError):
            raise
        except EngineError as exc:
            raise StageError(name, exc) from exc
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + (
                time.perf_counter() - started
            )


def _parse_stage(intervention_text: str, config: RunConfig):
    """Returns (intervention, query). Exactly one is non-None.

    Text whose leading token is a DSL keyword must parse as DSL; anything
    else is a free-text query for the llm backend.
    """
    try:
        return parse_intervention(intervention_text), None
    except UnknownKeyword:
        if config.intervene_backend == "llm":
            return None, intervention_text
        raise ConfigurationError(
            "free-text interventions need backend.intervene = llm"
        ) from None
    except ParseError:
        raise


def _llm_samples(
    factual: TwinSequence, query: str, config: RunConfig
) -> list[CounterfactualTwin]:
    backend = intervene_config(config)
    condensed = condense(factual, config.epsilon)
    first = factual.frame_range[0]
    window = (first, first + config.horizon)
    out = []
    for n in range(config.samples):
        edited = llm_edit(condensed, query, backend)
        twin = expand(edited, window)
        out.append(
            CounterfactualTwin(
                twin=twin,
                provenance=f"llm sample={n}",
                intervention=NULL_INTERVENTION,
            )
        )
    return out


def run_counterfactual(
    source,
    intervention_text: str,
    config: RunConfig = RunConfig(),
    store: SessionStore | None = None,
    progress=None,
) -> RunResult:
    """Execute one counterfactual run over a scenario spec or an input video.

    ``progress`` is called with each stage name as it starts. When ``store``
    is given, all artifacts and the run manifest are persisted and the
    manifest is attached to the result.
    """
    stages = _Stages(progress)
    run_id = compute_run_id(source, intervention_text, config)
    k = config.horizon

    intervention, query = stages.run(
        "parse", lambda: _parse_stage(intervention_text, config)
    )

    def build_input():
        if isinstance(source, ScenarioSpec):
            if tuple(config.background) != SIM_BACKGROUND:
                raise ConfigurationError(
                    "scenario inputs render on the simulator background "
                    f"{SIM_BACKGROUND}; set style.background to match"
                )
            t = intervention.at_frame if intervention is not None else 0
            states = simulate(generate_scenario(source), t + k)
            return render_states(states, fps=config.fps)
        if isinstance(source, Video):
            if len(source.frames) == 0:
                raise ConfigurationError("input video has no frames")
            return source
        raise ConfigurationError(f"unsupported run input {type(source).__name__}")

    factual_video = stages.run("input", build_input)

    factual_twin = stages.run(
        "perceive", lambda: perceive(factual_video, config.background)
    )

    def build_samples():
        if query is not None:
            return _llm_samples(factual_twin, query, config)
        return sample_trajectories(
            factual_twin, intervention, k, intervene_config(config)
        )

    samples = stages.run("intervene", build_samples)
    at_frame = samples[0].twin.frame_range[0]

    # Cell-scale style; explicit dims cover mask-less twins (llm path).
    style1 = RenderStyle(
        background=config.background,
        scale=1,
        width=factual_video.width,
        height=factual_video.height,
    )
    warnings: list[str] = []

    def synthesize_one(cf: CounterfactualTwin) -> tuple[Video, float]:
        factual_records = factual_twin.records_at(at_frame)
        edited_records = cf.twin.records_at(at_frame)
        original = factual_video.frames[at_frame]
        edited = edit_first_frame(original, factual_records, edited_records, style1)
        pre = check_consistency(edited, edited_records, config.background)
        if pre < config.threshold:
            raise ConsistencyRejected(pre, config.threshold)
        if config.synthesize_backend == "diffusion":
            first, last = cf.twin.frame_range
            request = SynthesisRequest(
                edited_first_frame=edited,
                twin=cf.twin,
                frames=last - first + 1,
                fps=config.fps,
            )
            video = diffusion_synthesize(request, diffusion_config(config))
        else:
            video = render_video(cf.twin, style1, fps=config.fps)
        score = check_consistency(video.frames[0], edited_records, config.background)
        return video, score

    videos: list[Video] = []
    consistency: list[float] = []
    for index, cf in enumerate(samples):
        video, score = stages.run("synthesize", lambda cf=cf: synthesize_one(cf))
        videos.append(video)
        consistency.append(score)
        if score < config.threshold:
            warnings.append(
                f"sample {index}: synthesized first frame scored "
                f"{score:.4f} against the edited twin (threshold "
                f"{config.threshold:.4f})"
            )

    eval_intervention = intervention if intervention is not None else NULL_INTERVENTION
    reports = [
        stages.run(
            "evaluate",
            lambda cf=cf, v=v: evaluate_sample(
                factual_twin, cf.twin, v, eval_intervention, config.background
            ),
        )
        for cf, v in zip(samples, videos)
    ]

    scale = config.scale
    result = RunResult(
        run_id=run_id,
        config=config,
        intervention_text=intervention_text,
        intervention=intervention,
        at_frame=at_frame,
        factual_twin=factual_twin,
        factual_video=_scaled_video(factual_video, scale),
        samples=samples,
        videos=[_scaled_video(v, scale) for v in videos],
        reports=reports,
        consistency=consistency,
        warnings=warnings,
        timings=stages.timings,
    )

    if store is not None:
        result.manifest = stages.run(
            "persist", lambda: _persist(store, source, intervention_text, result)
        )
    return result


def _persist(
    store: SessionStore, source, intervention_text: str, result: RunResult
) -> dict:
    config = result.config
    factual_twin_sha = store.put_blob(
        serialize_twin(result.factual_twin).encode("utf-8")
    )
    factual_video_sha = store.put_blob(encode_ppm_stream(result.factual_video))
    sample_entries = []
    for n, cf in enumerate(result.samples):
        twin_sha = store.put_blob(serialize_twin(cf.twin).encode("utf-8"))
        video_sha = store.put_blob(encode_ppm_stream(result.videos[n]))
        report = result.reports[n]
        report_sha = store.put_blob(report.to_text().encode("utf-8"))
        frames_csv_sha = store.put_blob(report.to_csv().encode("utf-8"))
        sample_entries.append(
            {
                "index": n,
                "provenance": cf.provenance,
                "twin": twin_sha,
                "video": video_sha,
                "report": report_sha,
                "frame_scores": frames_csv_sha,
                "frames": len(result.videos[n].frames),
                "consistency": result.consistency[n],
                "metrics": {
                    "psnr_mean": report.psnr_mean,
                    "ssim_mean": report.ssim_mean,
                    "frame_coherence": report.frame_coherence,
                    "grounding_iou": report.grounding_iou,
                    "intervention_success": report.intervention_success,
                },
            }
        )
    manifest = {
        "schema": MANIFEST_SCHEMA,
        "run_id": result.run_id,
        "status": "complete",
        "request": canonical_request(source, intervention_text, config),
        "at_frame": result.at_frame,
        "horizon": config.horizon,
        "fps": config.fps,
        "width": result.factual_video.width,
        "height": result.factual_video.height,
        "factual": {
            "twin": factual_twin_sha,
            "video": factual_video_sha,
            "frames": len(result.factual_video.frames),
        },
        "samples": sample_entries,
        "warnings": list(result.warnings),
    }
    store.put_run(result.run_id, manifest, timings=result.timings)
    return manifest


def load_run(store: SessionStore, run_id: str) -> RunResult:
    """Rebuild a RunResult from the store.

    The configuration is reconstructed from the canonical subset only;
    transport and store settings come back as defaults. Free-text
    interventions reload with ``intervention=None``.
    """
    manifest = store.get_manifest(run_id)
    request = manifest["request"]
    cfg_obj = dict(request["config"])
    cfg_obj["background"] = tuple(cfg_obj["background"])
    config = RunConfig(**cfg_obj)
    text = request["intervention"]
    try:
        intervention = parse_intervention(text)
    except ParseError:
        intervention = None

    factual_twin = parse_twin(
        store.get_blob(manifest["factual"]["twin"]).decode("utf-8")
    )
    factual_video = decode_ppm_stream(
        store.get_blob(manifest["factual"]["video"]), fps=config.fps
    )
    samples = []
    videos = []
    reports = []
    consistency = []
    for entry in manifest["samples"]:
        twin = parse_twin(store.get_blob(entry["twin"]).decode("utf-8"))
        samples.append(
            CounterfactualTwin(
                twin=twin,
                provenance=entry["provenance"],
                intervention=(
                    intervention if intervention is not None else NULL_INTERVENTION
                ),
            )
        )
        videos.append(
            decode_ppm_stream(store.get_blob(entry["video"]), fps=config.fps)
        )
        per_frame = parse_frame_scores(
            store.get_blob(entry["frame_scores"]).decode("utf-8")
        )
        reports.append(
            parse_report(
                store.get_blob(entry["report"]).decode("utf-8"), per_frame=per_frame
            )
        )
        consistency.append(float(entry["consistency"]))
    return RunResult(
        run_id=run_id,
        config=config,
        intervention_text=text,
        intervention=intervention,
        at_frame=int(manifest["at_frame"]),
        factual_twin=factual_twin,
        factual_video=factual_video,
        samples=samples,
        videos=videos,
        reports=reports,
        consistency=consistency,
        warnings=list(manifest.get("warnings", [])),
        timings=store.get_timings(run_id),
        manifest=manifest,
    )
