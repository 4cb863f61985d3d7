"""Frames, videos, and binary PPM (P6) input/output.

A Frame is an immutable RGB raster; a Video is an ordered frame sequence
with fps metadata (default 24). On disk a video is either a directory of
numbered ``frame_NNNNNN.ppm`` files or a single file of concatenated P6
images.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, TwinSyntaxError

DEFAULT_FPS = 24


@dataclass(frozen=True)
class Frame:
    width: int
    height: int
    pixels: bytes  # row-major RGB, len == width * height * 3

    def __post_init__(self):
        if len(self.pixels) != self.width * self.height * 3:
            raise DimensionMismatch(
                f"frame payload {len(self.pixels)} bytes does not match "
                f"{self.width}x{self.height}x3"
            )

    def to_array(self) -> np.ndarray:
        """(height, width, 3) uint8 view of the pixel data."""
        return np.frombuffer(self.pixels, dtype=np.uint8).reshape(
            self.height, self.width, 3
        )

    @classmethod
    def from_array(cls, array: np.ndarray) -> "Frame":
        arr = np.ascontiguousarray(array, dtype=np.uint8)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise DimensionMismatch(f"expected (h, w, 3) array, got {arr.shape}")
        return cls(width=arr.shape[1], height=arr.shape[0], pixels=arr.tobytes())


@dataclass(frozen=True)
class Video:
    frames: tuple[Frame, ...]
    fps: int = DEFAULT_FPS

    def __post_init__(self):
        sizes = {(f.width, f.height) for f in self.frames}
        if len(sizes) > 1:
            raise DimensionMismatch(f"frames disagree in size: {sorted(sizes)}")

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def width(self) -> int:
        return self.frames[0].width if self.frames else 0

    @property
    def height(self) -> int:
        return self.frames[0].height if self.frames else 0


# --- P6 PPM codec ---

def encode_ppm(frame: Frame) -> bytes:
    return b"P6\n%d %d\n255\n" % (frame.width, frame.height) + frame.pixels


def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # skip whitespace and '#' comment lines between header tokens
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c.isspace():
            pos += 1
        elif c == b"#":
            while pos < n and data[pos : pos + 1] != b"\n":
                pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise TwinSyntaxError("truncated PPM header")
    return data[start:pos], pos


def decode_ppm(data: bytes, offset: int = 0) -> tuple[Frame, int]:
    """Decode one P6 image starting at offset; returns (frame, next offset)."""
    magic, pos = _read_token(data, offset)
    if magic != b"P6":
        raise TwinSyntaxError(f"not a P6 PPM (magic {magic!r})")
    w_tok, pos = _read_token(data, pos)
    h_tok, pos = _read_token(data, pos)
    max_tok, pos = _read_token(data, pos)
    try:
        width, height, maxval = int(w_tok), int(h_tok), int(max_tok)
    except ValueError:
        raise TwinSyntaxError("non-numeric PPM header field") from None
    if maxval != 255:
        raise TwinSyntaxError(f"unsupported PPM maxval {maxval}")
    pos += 1  # single whitespace byte after maxval
    end = pos + width * height * 3
    if end > len(data):
        raise TwinSyntaxError("PPM payload shorter than header promises")
    return Frame(width=width, height=height, pixels=data[pos:end]), end


def decode_ppm_stream(data: bytes, fps: int = DEFAULT_FPS) -> Video:
    """Decode a concatenation of P6 images into a Video."""
    frames = []
    pos = 0
    while pos < len(data):
        frame, pos = decode_ppm(data, pos)
        frames.append(frame)
    return Video(frames=tuple(frames), fps=fps)


def encode_ppm_stream(video: Video) -> bytes:
    return b"".join(encode_ppm(f) for f in video.frames)


# --- file layout ---

_FRAME_NAME = re.compile(r"^frame_(\d{6})\.ppm$")


def frame_filename(index: int) -> str:
    return f"frame_{index:06d}.ppm"


def write_video_dir(video: Video, directory: str) -> list[str]:
    """Write numbered P6 frames into directory; returns the file names."""
    os.makedirs(directory, exist_ok=True)
    names = []
    for i, frame in enumerate(video.frames):
        name = frame_filename(i)
        with open(os.path.join(directory, name), "wb") as fh:
            fh.write(encode_ppm(frame))
        names.append(name)
    return names


def read_video(path: str, fps: int = DEFAULT_FPS) -> Video:
    """Read a video from a frame directory or a concatenated P6 file."""
    if os.path.isdir(path):
        entries = []
        for name in os.listdir(path):
            m = _FRAME_NAME.match(name)
            if m:
                entries.append((int(m.group(1)), name))
        entries.sort()
        frames = []
        for _, name in entries:
            with open(os.path.join(path, name), "rb") as fh:
                frame, _ = decode_ppm(fh.read())
            frames.append(frame)
        return Video(frames=tuple(frames), fps=fps)
    with open(path, "rb") as fh:
        return decode_ppm_stream(fh.read(), fps=fps)
