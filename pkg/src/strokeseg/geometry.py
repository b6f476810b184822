"""Domain types and box geometry shared by every stage of the pipeline.

Boxes keep their raw real-valued corners. Whenever an *area* is needed, each
axis whose extent is below one pixel is widened to exactly one pixel around
its centre, so a single-point stroke still has a 1 px² footprint and no ratio
ever divides by zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np


class EmptyStrokeSetError(ValueError):
    """Raised when a box is requested for zero strokes."""


class PartitionError(ValueError):
    """Raised when stroke groups do not partition a scene's strokes."""

    def __init__(self, message: str, orphans: Sequence[int] = (), duplicates: Sequence[int] = ()):
        super().__init__(message)
        self.orphans = list(orphans)
        self.duplicates = list(duplicates)


class Point(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Stroke:
    """A pen-down to pen-up polyline with its temporal index."""

    points: tuple[Point, ...]
    order: int = 0

    def __post_init__(self):
        if not self.points:
            raise ValueError("stroke has no points")
        pts = tuple(Point(float(x), float(y)) for x, y in self.points)
        for x, y in pts:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError(f"non-finite point in stroke {self.order}")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_xy(cls, xs: Iterable[float], ys: Iterable[float], order: int = 0) -> Stroke:
        return cls(tuple(zip(xs, ys)), order)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float).reshape(-1, 2)

    def translated(self, dx: float, dy: float) -> Stroke:
        return Stroke(tuple(Point(x + dx, y + dy) for x, y in self.points), self.order)

    def with_order(self, order: int) -> Stroke:
        return Stroke(self.points, order)


@dataclass(frozen=True)
class AABB:
    """Axis-aligned box ``(x_min, y_min, x_max, y_max)`` in pixels."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError(f"inverted box {self.as_tuple()}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x_min, self.y_min, self.x_max, self.y_max)

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def large_side(self) -> float:
        return max(self.width, self.height)

    @property
    def area(self) -> float:
        """Area with each extent floored at 1 px."""
        e = self.effective()
        return (e.x_max - e.x_min) * (e.y_max - e.y_min)

    def effective(self) -> AABB:
        """The box actually used for area algebra (sub-pixel axes widened to 1 px)."""
        x0, x1 = _widen(self.x_min, self.x_max)
        y0, y1 = _widen(self.y_min, self.y_max)
        return AABB(x0, y0, x1, y1)

    def union(self, other: AABB) -> AABB:
        return AABB(
            min(self.x_min, other.x_min),
            min(self.y_min, other.y_min),
            max(self.x_max, other.x_max),
            max(self.y_max, other.y_max),
        )

    def clip(self, width: float, height: float) -> AABB:
        def c(v, hi):
            return min(max(v, 0.0), float(hi))

        return AABB(c(self.x_min, width), c(self.y_min, height), c(self.x_max, width), c(self.y_max, height))

    def xywh(self) -> list[float]:
        return [self.x_min, self.y_min, self.width, self.height]


def _widen(lo: float, hi: float) -> tuple[float, float]:
    if hi - lo >= 1.0:
        return lo, hi
    c = (lo + hi) / 2.0
    return c - 0.5, c + 0.5


@dataclass(frozen=True)
class StrokeGroup:
    """A set of stroke indices claimed as one object instance."""

    stroke_indices: frozenset[int]
    box: AABB
    class_label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "stroke_indices", frozenset(int(i) for i in self.stroke_indices))
        if not self.stroke_indices:
            raise ValueError("stroke group is empty")

    @classmethod
    def from_strokes(cls, indices: Iterable[int], strokes: Sequence[Stroke], class_label: str | None = None) -> StrokeGroup:
        idx = frozenset(indices)
        return cls(idx, bbox_of_strokes([strokes[i] for i in sorted(idx)]), class_label)

    def sorted_indices(self) -> list[int]:
        return sorted(self.stroke_indices)

    def with_label(self, label: str | None) -> StrokeGroup:
        return StrokeGroup(self.stroke_indices, self.box, label)


@dataclass(frozen=True)
class PipelineConfig:
    """Tunable parameters of the stroke-to-box post-processor.

    ``stroke_thickness`` only affects rasterization; the grouping itself is
    purely vector-geometric.
    """

    iou_threshold: float = 0.65
    or_threshold: float = 0.60
    num_repeats: int = 3
    stroke_thickness: int = 2

    def __post_init__(self):
        for name in ("iou_threshold", "or_threshold"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if int(self.num_repeats) != self.num_repeats or self.num_repeats < 1:
            raise ValueError(f"num_repeats must be a positive integer, got {self.num_repeats}")
        if int(self.stroke_thickness) != self.stroke_thickness or self.stroke_thickness < 1:
            raise ValueError(f"stroke_thickness must be a positive integer, got {self.stroke_thickness}")

    def as_dict(self) -> dict:
        return {
            "iou_threshold": self.iou_threshold,
            "or_threshold": self.or_threshold,
            "num_repeats": int(self.num_repeats),
            "stroke_thickness": int(self.stroke_thickness),
        }


@dataclass(frozen=True)
class Scene:
    """Strokes on a canvas, optionally with ground-truth instance groups."""

    canvas_w: int
    canvas_h: int
    strokes: tuple[Stroke, ...]
    gt_instances: tuple[StrokeGroup, ...] | None = None
    scene_id: str | None = field(default=None, compare=False)

    def __post_init__(self):
        strokes = tuple(sorted(self.strokes, key=lambda s: s.order))
        if [s.order for s in strokes] != list(range(len(strokes))):
            raise ValueError("stroke orders must be unique and form 0..N-1")
        for s in strokes:
            for x, y in s.points:
                if not (0 <= x <= self.canvas_w and 0 <= y <= self.canvas_h):
                    raise ValueError(f"stroke {s.order} has point ({x}, {y}) outside the canvas")
        object.__setattr__(self, "strokes", strokes)
        if self.gt_instances is not None:
            gt = tuple(self.gt_instances)
            check_partition(gt, len(strokes))
            object.__setattr__(self, "gt_instances", gt)

    @property
    def num_strokes(self) -> int:
        return len(self.strokes)


def bbox_of_strokes(strokes: Sequence[Stroke]) -> AABB:
    """Tightest box around every point of every stroke."""
    if len(strokes) == 0:
        raise EmptyStrokeSetError("empty stroke set")
    xs = [p.x for s in strokes for p in s.points]
    ys = [p.y for s in strokes for p in s.points]
    return AABB(min(xs), min(ys), max(xs), max(ys))


def intersection_area(a: AABB, b: AABB) -> float:
    ea, eb = a.effective(), b.effective()
    w = min(ea.x_max, eb.x_max) - max(ea.x_min, eb.x_min)
    h = min(ea.y_max, eb.y_max) - max(ea.y_min, eb.y_min)
    if w <= 0 or h <= 0:
        return 0.0
    return w * h


def iou(a: AABB, b: AABB) -> float:
    inter = intersection_area(a, b)
    if inter == 0.0:
        return 0.0
    return inter / (a.area + b.area - inter)


def overlap_ratio(group_box: AABB, det_box: AABB) -> float:
    """Share of ``group_box`` covered by ``det_box``. Not symmetric."""
    return intersection_area(group_box, det_box) / group_box.area


def box_distance(a: AABB, b: AABB) -> float:
    """Length of the shortest gap between two rectangles; 0 when they touch."""
    dx = max(0.0, b.x_min - a.x_max, a.x_min - b.x_max)
    dy = max(0.0, b.y_min - a.y_max, a.y_min - b.y_max)
    return math.hypot(dx, dy)


def check_partition(groups: Iterable[StrokeGroup | Iterable[int]], num_strokes: int) -> None:
    """Raise :class:`PartitionError` unless ``groups`` cover ``0..num_strokes-1`` exactly once."""
    seen: dict[int, int] = {}
    duplicates = set()
    out_of_range = set()
    for g in groups:
        idx = g.stroke_indices if isinstance(g, StrokeGroup) else g
        for i in idx:
            if not 0 <= i < num_strokes:
                out_of_range.add(i)
            if i in seen:
                duplicates.add(i)
            seen[i] = seen.get(i, 0) + 1
    orphans = sorted(set(range(num_strokes)) - set(seen))
    if duplicates or orphans or out_of_range:
        parts = []
        if duplicates:
            parts.append(f"duplicate indices {sorted(duplicates)}")
        if orphans:
            parts.append(f"orphan indices {orphans}")
        if out_of_range:
            parts.append(f"out-of-range indices {sorted(out_of_range)}")
        raise PartitionError("annotation partition violation: " + "; ".join(parts), orphans, sorted(duplicates))
