from .consistency import check_consistency
from .diffusion import DiffusionConfig, SynthesisRequest, diffusion_synthesize
from .edit import edit_first_frame
from .manifest import manifest_text, parse_manifest, twin_hash, write_video_artifacts
from .render import RenderStyle, record_color, record_mask, render_frame, render_video

__all__ = [
    "DiffusionConfig",
    "RenderStyle",
    "SynthesisRequest",
    "check_consistency",
    "diffusion_synthesize",
    "edit_first_frame",
    "manifest_text",
    "parse_manifest",
    "record_color",
    "record_mask",
    "render_frame",
    "render_video",
    "twin_hash",
    "write_video_artifacts",
]
