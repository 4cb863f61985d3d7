"""Command-line interface.

Subcommands mirror the pipeline stages (`simulate`, `perceive`, `intervene`,
`synthesize`, `evaluate`), plus `run` for the whole chain, `serve` for the
HTTP service, and the utilities `validate-twin` and `condense`.

Exit status: 0 success, 1 domain error (printed to stderr as
``error[CODE]: message``), 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import EngineError, StageError
from .intervene.dsl import parse_intervention
from .intervene.sampling import sample_trajectories
from .metrics.report import evaluate_sample
from .perception.perceive import perceive
from .pipeline.config import (
    load_config,
    parse_background,
    render_style,
    intervene_config,
    with_overrides,
)
from .pipeline.runner import run_counterfactual
from .pipeline.store import SessionStore
from .sim.groundtruth import groundtruth_twin
from .sim.render import render_states
from .sim.world import (
    ScenarioSpec,
    generate_scenario,
    parse_scenario_file,
    serialize_world,
    simulate,
)
from .synthesize.manifest import write_video_artifacts
from .synthesize.render import RenderStyle, render_video
from .twin.codec import parse_twin, serialize_twin
from .twin.condense import condense, serialize_condensed
from .twin.model import validate
from .video import read_video


def _background(text: str):
    try:
        return parse_background(text)
    except EngineError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write_text(path: str, text: str):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text, encoding="utf-8")


def _load_scenario(args) -> ScenarioSpec:
    if getattr(args, "scenario", None):
        return parse_scenario_file(_read_text(args.scenario))
    return ScenarioSpec(seed=args.seed if args.seed is not None else 0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cwmdt",
        description="counterfactual world-model engine over digital twins",
    )
    parser.add_argument("--config", help="key-value config file", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a scenario and render its clip")
    p.add_argument("--seed", type=int, default=None, help="scenario seed")
    p.add_argument("--scenario", default=None, help="scenario spec file")
    p.add_argument("--frames", type=int, default=None, help="steps to simulate")
    p.add_argument("--out", required=True, help="output directory for the clip")
    p.add_argument("--world-out", default=None, help="write initial world state")
    p.add_argument("--twin-out", default=None, help="write ground-truth twin")

    p = sub.add_parser("perceive", help="build a twin from a video")
    p.add_argument("--video", required=True, help="frame directory or PPM stream")
    p.add_argument("--background", type=_background, default=None)
    p.add_argument("--out", required=True, help="twin document path")

    p = sub.add_parser("intervene", help="apply an intervention and sample twins")
    p.add_argument("--twin", required=True, help="source twin document")
    p.add_argument("--intervention", required=True)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=None, help="sampling seed")
    p.add_argument("--out", required=True, help="directory for sample twins")

    p = sub.add_parser("synthesize", help="render a twin to a video clip")
    p.add_argument("--twin", required=True)
    p.add_argument("--background", type=_background, default=None)
    p.add_argument("--scale", type=int, default=None)
    p.add_argument("--fps", type=int, default=None)
    p.add_argument("--out", required=True, help="output directory for the clip")

    p = sub.add_parser("evaluate", help="score a video against a twin")
    p.add_argument("--video", required=True)
    p.add_argument("--twin", required=True, help="counterfactual twin document")
    p.add_argument("--intervention", required=True)
    p.add_argument(
        "--factual",
        default=None,
        help="pre-intervention twin (defaults to --twin; needed for "
        "success checks that look up the original target)",
    )
    p.add_argument("--background", type=_background, default=None)
    p.add_argument("--report", default=None, help="write report here, else stdout")
    p.add_argument("--csv", default=None, help="write per-frame scores as CSV")

    p = sub.add_parser("run", help="full counterfactual run")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--seed", type=int, default=None, help="scenario seed")
    group.add_argument("--scenario", default=None, help="scenario spec file")
    group.add_argument("--video", default=None, help="input video")
    p.add_argument("--intervention", required=True)
    p.add_argument("--out", required=True, help="session store root")
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--fps", type=int, default=None)
    p.add_argument("--scale", type=int, default=None)
    p.add_argument("--background", type=_background, default=None)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--store", default=None, help="session store root")

    p = sub.add_parser("validate-twin", help="check a twin document")
    p.add_argument("twin", help="twin document path")

    p = sub.add_parser("condense", help="keypoint-compress a twin")
    p.add_argument("--twin", required=True)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--out", required=True, help="condensed document path")

    return parser


# --- subcommand bodies ---

def _cmd_simulate(args, config) -> int:
    spec = _load_scenario(args)
    frames = args.frames if args.frames is not None else config.horizon
    states = simulate(generate_scenario(spec), frames)
    video = render_states(states, fps=config.fps)
    twin = groundtruth_twin(states)
    twin_text = serialize_twin(twin)
    write_video_artifacts(args.out, video, twin_text)
    if args.world_out:
        _write_text(args.world_out, serialize_world(states[0]))
    if args.twin_out:
        _write_text(args.twin_out, twin_text)
    print(f"wrote {len(video.frames)} frames to {args.out}")
    return 0


def _cmd_perceive(args, config) -> int:
    background = args.background if args.background is not None else config.background
    video = read_video(args.video, fps=config.fps)
    twin = perceive(video, background)
    _write_text(args.out, serialize_twin(twin))
    print(
        f"perceived {len(twin.major_elements)} object(s) "
        f"over {len(video.frames)} frames"
    )
    return 0


def _cmd_intervene(args, config) -> int:
    config = with_overrides(
        config, horizon=args.horizon, samples=args.samples, seed=args.seed
    )
    source = parse_twin(_read_text(args.twin))
    intervention = parse_intervention(args.intervention)
    samples = sample_trajectories(
        source, intervention, config.horizon, intervene_config(config)
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for n, cf in enumerate(samples):
        path = out / f"sample_{n:03d}.json"
        path.write_text(serialize_twin(cf.twin), encoding="utf-8")
        print(f"{path} ({cf.provenance})")
    return 0


def _cmd_synthesize(args, config) -> int:
    config = with_overrides(config, scale=args.scale, fps=args.fps)
    if args.background is not None:
        config = with_overrides(config, background=args.background)
    twin = parse_twin(_read_text(args.twin))
    video = render_video(twin, render_style(config), fps=config.fps)
    write_video_artifacts(args.out, video, serialize_twin(twin))
    print(f"wrote {len(video.frames)} frames to {args.out}")
    return 0


def _cmd_evaluate(args, config) -> int:
    background = args.background if args.background is not None else config.background
    video = read_video(args.video, fps=config.fps)
    counterfactual = parse_twin(_read_text(args.twin))
    factual = (
        parse_twin(_read_text(args.factual)) if args.factual else counterfactual
    )
    intervention = parse_intervention(args.intervention)
    report = evaluate_sample(factual, counterfactual, video, intervention, background)
    text = report.to_text()
    if args.report:
        _write_text(args.report, text)
    else:
        sys.stdout.write(text)
    if args.csv:
        _write_text(args.csv, report.to_csv())
    return 0


def _cmd_run(args, config) -> int:
    config = with_overrides(
        config,
        horizon=args.horizon,
        samples=args.samples,
        epsilon=args.epsilon,
        threshold=args.threshold,
        fps=args.fps,
        scale=args.scale,
    )
    if args.background is not None:
        config = with_overrides(config, background=args.background)
    if args.video:
        source = read_video(args.video, fps=config.fps)
    elif args.scenario:
        source = parse_scenario_file(_read_text(args.scenario))
    else:
        source = ScenarioSpec(seed=args.seed)
        config = with_overrides(config, seed=args.seed)
    store = SessionStore(args.out)
    result = run_counterfactual(source, args.intervention, config, store=store)
    print(f"run {result.run_id}")
    for n, report in enumerate(result.reports):
        print(
            f"sample {n}: success={report.intervention_success!r} "
            f"psnr={report.psnr_mean:.2f} ssim={report.ssim_mean:.4f} "
            f"grounding={report.grounding_iou:.4f} "
            f"consistency={result.consistency[n]:.4f}"
        )
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def _cmd_serve(args, config) -> int:
    from .service.app import serve

    config = with_overrides(
        config,
        service_host=args.host,
        service_port=args.port,
        store_dir=args.store,
    )
    serve(config)
    return 0


def _cmd_validate_twin(args, config) -> int:
    twin = parse_twin(_read_text(args.twin))
    violations = validate(twin)
    for v in violations:
        print(f"{v.code} {v.path} {v.message}")
    if violations:
        return 1
    print("ok")
    return 0


def _cmd_condense(args, config) -> int:
    twin = parse_twin(_read_text(args.twin))
    epsilon = args.epsilon if args.epsilon is not None else config.epsilon
    condensed = condense(twin, epsilon)
    _write_text(args.out, serialize_condensed(condensed))
    keypoints = sum(len(el.motion_keypoints) for el in condensed.elements)
    print(f"{len(condensed.elements)} element(s), {keypoints} keypoint(s)")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "perceive": _cmd_perceive,
    "intervene": _cmd_intervene,
    "synthesize": _cmd_synthesize,
    "evaluate": _cmd_evaluate,
    "run": _cmd_run,
    "serve": _cmd_serve,
    "validate-twin": _cmd_validate_twin,
    "condense": _cmd_condense,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        config = load_config(args.config)
        return _COMMANDS[args.command](args, config)
    except StageError as exc:
        cause_code = getattr(exc.cause, "code", exc.code)
        print(f"error[{cause_code}] in stage {exc.stage}: {exc.cause}", file=sys.stderr)
        return 1
    except EngineError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error[IO]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
