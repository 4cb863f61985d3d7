"""Video directory manifest (key-value text next to the numbered frames)."""

from __future__ import annotations

import hashlib
from pathlib import Path

from ..errors import SchemaError
from ..video import Video, write_video_dir

MANIFEST_NAME = "manifest"


def twin_hash(twin_text: str) -> str:
    return hashlib.sha256(twin_text.encode("utf-8")).hexdigest()


def manifest_text(video: Video, twin_sha256: str) -> str:
    frame = video.frames[0]
    return (
        f"frames = {len(video.frames)}\n"
        f"fps = {video.fps}\n"
        f"width = {frame.width}\n"
        f"height = {frame.height}\n"
        f"twin_sha256 = {twin_sha256}\n"
    )


def parse_manifest(text: str) -> dict:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SchemaError(f"line {lineno}: expected 'key = value'", MANIFEST_NAME)
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    try:
        return {
            "frames": int(values["frames"]),
            "fps": int(values["fps"]),
            "width": int(values["width"]),
            "height": int(values["height"]),
            "twin_sha256": values["twin_sha256"],
        }
    except (KeyError, ValueError) as exc:
        raise SchemaError(f"bad manifest field: {exc}", MANIFEST_NAME) from None


def write_video_artifacts(directory: str | Path, video: Video, twin_text: str) -> Path:
    """Numbered PPM frames plus the manifest; returns the manifest path."""
    directory = Path(directory)
    write_video_dir(video, str(directory))
    path = directory / MANIFEST_NAME
    path.write_text(manifest_text(video, twin_hash(twin_text)), encoding="utf-8")
    return path
