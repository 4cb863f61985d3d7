"""Video to twin: segmentation, tracking, depth, and trace assembly."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..colors import rgb_to_color
from ..errors import TooShort
from ..quantize import round4
from ..twin.model import (
    ObjectRecord,
    TwinSequence,
    build_element,
    build_twin,
    make_record,
    require_valid,
)
from ..video import Frame, Video
from .depth import infer_depth_order
from .describe import caption, scene_summary, spatial_summary
from .segment import classify_category, segment
from .track import track


@dataclass
class _History:
    category: str
    attributes: str
    max_area: int
    z: float = 0.0
    captions: list[str] = field(default_factory=list)
    records: list[ObjectRecord] = field(default_factory=list)


def perceive(video: Video | list[Frame], background: tuple[int, int, int] = (0, 0, 0)) -> TwinSequence:
    """Build a validated TwinSequence from rendered frames.

    Category and attributes are fixed at an object's first sighting; depth
    carries over between frames and is re-ranked from occlusion evidence.
    An object that disappears ends its trace; a reappearance gets a new id
    so presence intervals stay contiguous.
    """
    frames = list(video.frames) if isinstance(video, Video) else list(video)
    if not frames:
        raise TooShort("perception needs at least one frame")
    width, height = frames[0].width, frames[0].height

    history: dict[int, _History] = {}
    prev_records: list[ObjectRecord] = []
    next_id = 0

    for frame_index, frame in enumerate(frames):
        regions = segment(frame, background)
        ids = track(prev_records, regions, next_id)
        if ids:
            next_id = max(next_id, max(ids) + 1)

        expected = []
        priors = []
        for region, object_id in zip(regions, ids):
            past = history.get(object_id)
            expected.append(max(past.max_area if past else 0, region.area))
            priors.append(past.z if past else 0.0)
        depths = infer_depth_order(regions, expected, priors)

        current: list[ObjectRecord] = []
        for i, (region, object_id) in enumerate(zip(regions, ids)):
            past = history.get(object_id)
            if past is None:
                category = classify_category(region)
                attributes = f"{rgb_to_color(region.color)} {category}"
                past = _History(category=category, attributes=attributes, max_area=0)
                history[object_id] = past
            past.max_area = expected[i]
            past.z = depths[i]
            cx, cy = region.centroid
            _, _, bw, bh = region.bbox
            record = make_record(
                object_id,
                past.category,
                past.attributes,
                frame_index,
                x=round4(cx),
                y=round4(cy),
                z=depths[i],
                w=bw,
                h=bh,
                mask=region.mask,
            )
            past.records.append(record)
            past.captions.append(caption(past.attributes, cx, cy, width, height))
            current.append(record)
        prev_records = current

    elements = [
        build_element(object_id, h.category, h.attributes, h.records, h.captions)
        for object_id, h in sorted(history.items())
    ]
    twin = build_twin(
        scene_summary(elements),
        spatial_summary(elements),
        (0, len(frames) - 1),
        elements,
    )
    return require_valid(twin)
