import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cwmdt.errors import DimensionMismatch, TwinSyntaxError
from cwmdt.video import (
    Frame,
    Video,
    decode_ppm,
    decode_ppm_stream,
    encode_ppm,
    encode_ppm_stream,
    frame_filename,
    read_video,
    write_video_dir,
)

from conftest import frame_from, random_frame


def test_frame_size_check():
    with pytest.raises(DimensionMismatch):
        Frame(width=2, height=2, pixels=b"\x00" * 11)


def test_frame_array_round_trip():
    rng = np.random.default_rng(0)
    arr = rng.integers(0, 256, size=(5, 7, 3), dtype=np.uint8)
    frame = Frame.from_array(arr)
    assert frame.width == 7 and frame.height == 5
    assert np.array_equal(frame.to_array(), arr)


def test_video_uniformity():
    a = frame_from(np.zeros((4, 4, 3)))
    b = frame_from(np.zeros((5, 4, 3)))
    with pytest.raises(DimensionMismatch):
        Video(frames=(a, b))


def test_ppm_header():
    frame = frame_from(np.zeros((2, 3, 3)))
    data = encode_ppm(frame)
    assert data.startswith(b"P6\n3 2\n255\n")
    assert len(data) == len(b"P6\n3 2\n255\n") + 18


@settings(max_examples=25)
@given(st.integers(1, 16), st.integers(1, 16), st.integers(0, 2**32 - 1))
def test_ppm_round_trip(w, h, seed):
    rng = np.random.default_rng(seed)
    frame = random_frame(rng, w, h)
    decoded, end = decode_ppm(encode_ppm(frame))
    assert decoded == frame
    assert end == len(encode_ppm(frame))


def test_ppm_whitespace_variants():
    # comments and arbitrary whitespace in the header are legal P6
    data = b"P6 # comment\n 3\t2 # again\n255\n" + bytes(18)
    frame, _ = decode_ppm(data)
    assert (frame.width, frame.height) == (3, 2)


def test_ppm_truncated():
    frame = frame_from(np.zeros((2, 2, 3)))
    data = encode_ppm(frame)
    with pytest.raises(TwinSyntaxError):
        decode_ppm(data[:-1])


def test_stream_round_trip():
    rng = np.random.default_rng(7)
    video = Video(frames=tuple(random_frame(rng, 6, 4) for _ in range(5)), fps=24)
    back = decode_ppm_stream(encode_ppm_stream(video))
    assert back.frames == video.frames


def test_frame_filename():
    assert frame_filename(0) == "frame_000000.ppm"
    assert frame_filename(123) == "frame_000123.ppm"


def test_video_dir_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    video = Video(frames=tuple(random_frame(rng, 8, 8) for _ in range(3)), fps=24)
    write_video_dir(video, str(tmp_path / "clip"))
    back = read_video(str(tmp_path / "clip"))
    assert back.frames == video.frames


def test_read_video_stream_file(tmp_path):
    rng = np.random.default_rng(4)
    video = Video(frames=tuple(random_frame(rng, 8, 8) for _ in range(3)), fps=24)
    path = tmp_path / "clip.ppm"
    path.write_bytes(encode_ppm_stream(video))
    back = read_video(str(path))
    assert back.frames == video.frames
