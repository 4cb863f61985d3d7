"""Named color palette shared by the simulator, perception, and rendering.

Attribute text refers to colors by these names (or by #rrggbb hex for
colors outside the palette). The RGB values are fixed: perception relies
on exact lookup to recover the name from rendered pixels.
"""

from __future__ import annotations

from .errors import UnknownColor

PALETTE: dict[str, tuple[int, int, int]] = {
    "red": (220, 50, 50),
    "green": (60, 200, 80),
    "blue": (70, 110, 230),
    "yellow": (235, 220, 70),
    "magenta": (220, 70, 220),
    "cyan": (70, 220, 220),
    "orange": (240, 160, 60),
    "purple": (160, 80, 220),
    "pink": (240, 150, 190),
    "teal": (60, 160, 150),
}

_RGB_TO_NAME = {rgb: name for name, rgb in PALETTE.items()}


def color_to_rgb(name: str) -> tuple[int, int, int]:
    """Resolve a palette name or #rrggbb hex string to an RGB triple."""
    if name in PALETTE:
        return PALETTE[name]
    if name.startswith("#") and len(name) == 7:
        try:
            return tuple(int(name[i : i + 2], 16) for i in (1, 3, 5))  # type: ignore[return-value]
        except ValueError:
            pass
    raise UnknownColor(f"unknown color {name!r}")


def rgb_to_color(rgb: tuple[int, int, int]) -> str:
    """Name for an RGB triple: palette name if exact, else #rrggbb."""
    name = _RGB_TO_NAME.get(tuple(rgb))
    if name is not None:
        return name
    return "#{:02x}{:02x}{:02x}".format(*rgb)
