"""Canonical numeric precision for twin coordinates.

All spatial values that can end up in a serialized twin are kept on a
4-fractional-digit grid. Rounding half-even matches the serializer's
fixed-point formatting, so construction-time quantization makes the
text round trip lossless.
"""

from __future__ import annotations

DIGITS = 4


def round4(value: float) -> float:
    """Round to 4 fractional digits, half to even; normalizes -0.0 to 0.0."""
    v = round(float(value), DIGITS)
    return 0.0 if v == 0.0 else v


def fmt4(value: float) -> str:
    """Fixed-point text with exactly 4 fractional digits."""
    v = round(float(value), DIGITS)
    if v == 0.0:
        v = 0.0
    return f"{v:.{DIGITS}f}"
