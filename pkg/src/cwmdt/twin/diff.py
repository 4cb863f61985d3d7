"""Structured twin-to-twin comparison."""

from __future__ import annotations

from dataclasses import dataclass

from .model import TwinSequence


@dataclass(frozen=True)
class Change:
    """One field difference. id/frame are None for twin- or element-level fields."""

    id: int | None
    frame: int | None
    field: str
    a: object
    b: object


@dataclass(frozen=True)
class TwinDiff:
    added: tuple[int, ...]
    removed: tuple[int, ...]
    changes: tuple[Change, ...]

    @property
    def empty(self) -> bool:
        return not self.added and not self.removed and not self.changes

    def changes_for(self, object_id: int) -> tuple[Change, ...]:
        return tuple(c for c in self.changes if c.id == object_id)


_SPATIAL_FIELDS = ("x", "y", "z", "w", "h")


def diff_twins(a: TwinSequence, b: TwinSequence) -> TwinDiff:
    """Symmetric diff: ids added/removed in b, and per-frame field changes.

    The diff is empty exactly when a == b: twin-level text fields and the
    frame range are compared too, not just the element data.
    """
    changes: list[Change] = []
    for name in ("summary", "spatial_summary", "frame_range"):
        va, vb = getattr(a, name), getattr(b, name)
        if va != vb:
            changes.append(Change(id=None, frame=None, field=name, a=va, b=vb))

    ids_a = {el.id for el in a.major_elements}
    ids_b = {el.id for el in b.major_elements}
    added = tuple(sorted(ids_b - ids_a))
    removed = tuple(sorted(ids_a - ids_b))

    for object_id in sorted(ids_a & ids_b):
        ea = a.element(object_id)
        eb = b.element(object_id)
        assert ea is not None and eb is not None
        for name in ("category", "attributes"):
            va, vb = getattr(ea, name), getattr(eb, name)
            if va != vb:
                changes.append(Change(id=object_id, frame=None, field=name, a=va, b=vb))
        frames_a = {r.frame: r for r in ea.records}
        frames_b = {r.frame: r for r in eb.records}
        for frame in sorted(frames_a.keys() | frames_b.keys()):
            ra, rb = frames_a.get(frame), frames_b.get(frame)
            if ra is None or rb is None:
                changes.append(
                    Change(
                        id=object_id,
                        frame=frame,
                        field="presence",
                        a=ra is not None,
                        b=rb is not None,
                    )
                )
                continue
            for name in _SPATIAL_FIELDS:
                va = getattr(ra.spatial, name)
                vb = getattr(rb.spatial, name)
                if va != vb:
                    changes.append(Change(id=object_id, frame=frame, field=name, a=va, b=vb))
            if ra.mask != rb.mask:
                changes.append(
                    Change(id=object_id, frame=frame, field="mask", a=ra.mask, b=rb.mask)
                )
        # caption differences matter for equality even when spatial data agrees
        if ea.frame_captions != eb.frame_captions:
            changes.append(
                Change(
                    id=object_id,
                    frame=None,
                    field="frame_captions",
                    a=ea.frame_captions,
                    b=eb.frame_captions,
                )
            )
    return TwinDiff(added=added, removed=removed, changes=tuple(changes))
