"""Classical image quality metrics, pinned for reproducibility.

PSNR is 10*log10(255^2 / MSE) over all channels, capped at 99.0 dB
(identical frames would otherwise be infinite). SSIM is the mean local
score over non-overlapping 8x8 windows (partial edge windows are
dropped) on BT.601 luma with K1=0.01, K2=0.03, L=255 and population
statistics; this is deliberately simpler than the sliding-Gaussian
variant and is documented so numbers are reproducible.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DimensionMismatch, TooShort, TooSmall
from ..video import Frame, Video

PSNR_CAP = 99.0  # dB
WINDOW = 8
K1 = 0.01
K2 = 0.03
L = 255.0


def _check_dims(a: Frame, b: Frame) -> None:
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionMismatch(
            f"{a.width}x{a.height} vs {b.width}x{b.height}"
        )


def psnr(a: Frame, b: Frame) -> float:
    _check_dims(a, b)
    fa = a.to_array().astype(np.float64)
    fb = b.to_array().astype(np.float64)
    mse = float(np.mean((fa - fb) ** 2))
    if mse == 0.0:
        return PSNR_CAP
    return min(PSNR_CAP, 10.0 * math.log10(L * L / mse))


def _luma(frame: Frame) -> np.ndarray:
    rgb = frame.to_array().astype(np.float64)
    return 0.299 * rgb[:, :, 0] + 0.587 * rgb[:, :, 1] + 0.114 * rgb[:, :, 2]


def _windowed(y: np.ndarray, rows: int, cols: int) -> np.ndarray:
    # one row per full window, edge remainders dropped
    tiles = y[:rows, :cols].reshape(rows // WINDOW, WINDOW, cols // WINDOW, WINDOW)
    return tiles.transpose(0, 2, 1, 3).reshape(-1, WINDOW * WINDOW)


def ssim(a: Frame, b: Frame) -> float:
    _check_dims(a, b)
    if min(a.width, a.height) < WINDOW:
        raise TooSmall(f"frames must be at least {WINDOW} cells per side")
    rows = (a.height // WINDOW) * WINDOW
    cols = (a.width // WINDOW) * WINDOW
    wa = _windowed(_luma(a), rows, cols)
    wb = _windowed(_luma(b), rows, cols)
    c1 = (K1 * L) ** 2
    c2 = (K2 * L) ** 2
    mu_a = wa.mean(axis=1)
    mu_b = wb.mean(axis=1)
    var_a = wa.var(axis=1)
    var_b = wb.var(axis=1)
    cov = ((wa - mu_a[:, None]) * (wb - mu_b[:, None])).mean(axis=1)
    scores = ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) / (
        (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    )
    return float(np.mean(scores))


def frame_coherence(video: Video) -> float:
    """Mean SSIM over consecutive frame pairs."""
    if len(video.frames) < 2:
        raise TooShort("frame coherence needs at least 2 frames")
    pairs = zip(video.frames[:-1], video.frames[1:])
    return float(np.mean([ssim(x, y) for x, y in pairs]))
