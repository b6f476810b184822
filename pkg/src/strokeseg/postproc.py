"""Stroke-to-box post-processing.

Turns class-agnostic detector boxes into a partition of a scene's strokes.
Each outer iteration:

a. clears every assignment;
b. deduplicates the working boxes and sorts them by area, smallest first;
c. gives each box the contiguous run of unassigned strokes whose tight box
   has the highest IoU with it, if that IoU exceeds ``iou_threshold``;
d. walks the remaining maximal unassigned runs, longest first, and hands each
   to its nearest box when the share of the run's box covered by that box
   exceeds ``or_threshold``;
e. turns every run still unassigned into a new box of its own;
f. refits every box to the tight box of its strokes and drops empty ones.

Iteration stops once the grouping repeats or after ``num_repeats`` passes.
"""

from __future__ import annotations

import os
import statistics
import time
import tracemalloc
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .geometry import AABB, PipelineConfig, Scene, Stroke, StrokeGroup, box_distance, overlap_ratio
from .sketch_io import DetectionSet, SegmentationResult, dumps_scene

BoxTuple = tuple[float, float, float, float]


def maximal_runs(assigned: Sequence[bool]) -> list[range]:
    """Maximal runs of consecutive unassigned (falsy) positions, in temporal order."""
    runs = []
    start = None
    for i, a in enumerate(assigned):
        if not a and start is None:
            start = i
        elif a and start is not None:
            runs.append(range(start, i))
            start = None
    if start is not None:
        runs.append(range(start, len(assigned)))
    return runs


def stroke_boxes(strokes: Sequence[Stroke]) -> np.ndarray:
    """``(n, 4)`` array of per-stroke tight boxes."""
    out = np.empty((len(strokes), 4), dtype=float)
    for i, s in enumerate(strokes):
        xs = [p.x for p in s.points]
        ys = [p.y for p in s.points]
        out[i] = (min(xs), min(ys), max(xs), max(ys))
    return out


def _widen(lo: float, hi: float) -> tuple[float, float]:
    # same arithmetic as geometry._widen
    if hi - lo >= 1.0:
        return lo, hi
    c = (lo + hi) / 2.0
    return c - 0.5, c + 0.5


def _best_in_run(sb: list, lo: int, hi: int, box: BoxTuple) -> tuple[float, int, int]:
    """Best ``(iou, length, -start)`` over the subranges of ``sb[lo:hi]``.

    Plain floats on purpose: runs hold a few dozen strokes, where per-call
    numpy overhead and temporaries cost more than they save.
    """
    bx0, bx1 = _widen(box[0], box[2])
    by0, by1 = _widen(box[1], box[3])
    area_b = (bx1 - bx0) * (by1 - by0)
    best = (-1.0, 0, 0)
    for start in range(lo, hi):
        x0, y0, x1, y1 = sb[start]
        for k in range(start, hi):
            if k > start:
                r = sb[k]
                x0, y0 = min(x0, r[0]), min(y0, r[1])
                x1, y1 = max(x1, r[2]), max(y1, r[3])
            ex0, ex1 = _widen(x0, x1)
            ey0, ey1 = _widen(y0, y1)
            w = min(ex1, bx1) - max(ex0, bx0)
            h = min(ey1, by1) - max(ey0, by0)
            if w <= 0 or h <= 0:
                v = 0.0
            else:
                inter = w * h
                v = inter / ((ex1 - ex0) * (ey1 - ey0) + area_b - inter)
            key = (v, k - start + 1, -start)
            if key > best:
                best = key
    return best


def _as_box_tuple(box: AABB | Sequence[float]) -> BoxTuple:
    if isinstance(box, AABB):
        return box.as_tuple()
    return tuple(float(v) for v in box)  # type: ignore[return-value]


def best_sequence_for_box(
    box: AABB | BoxTuple,
    strokes: Sequence[Stroke] | np.ndarray | Sequence[BoxTuple],
    assigned: Sequence[bool] | None = None,
) -> tuple[range | None, float]:
    """Contiguous unassigned stroke range whose tight box best matches ``box`` by IoU.

    Every subrange of every maximal unassigned run is a candidate. Ties go to
    the longer range, then the earlier start. Returns ``(None, 0.0)`` when no
    stroke is unassigned.
    """
    if isinstance(strokes, np.ndarray):
        sb = strokes.tolist()
    elif strokes and isinstance(strokes[0], Stroke):
        sb = stroke_boxes(strokes).tolist()
    else:
        sb = list(strokes)
    if assigned is None:
        assigned = [False] * len(sb)
    box = _as_box_tuple(box)
    best = None
    for run in maximal_runs(assigned):
        key = _best_in_run(sb, run.start, run.stop, box)
        if best is None or key > best:
            best = key
    if best is None:
        return None, 0.0
    v, length, neg_start = best
    return range(-neg_start, -neg_start + length), v


def _area(b: BoxTuple) -> float:
    return AABB(*b).area


def _sort_key(b: BoxTuple):
    return (_area(b), b)


def _union(sb: np.ndarray, idx) -> BoxTuple:
    rows = sb[idx]
    return (
        float(rows[:, 0].min()),
        float(rows[:, 1].min()),
        float(rows[:, 2].max()),
        float(rows[:, 3].max()),
    )


def _nearest(target: AABB, boxes: Sequence[BoxTuple]) -> int:
    # gap distance, then smaller area, then list position
    return min(range(len(boxes)), key=lambda j: (box_distance(target, AABB(*boxes[j])), _area(boxes[j]), j))


@dataclass
class _Pass:
    owner: np.ndarray
    boxes: list[BoxTuple]


def _one_pass(sb: np.ndarray, boxes: list[BoxTuple], cfg: PipelineConfig) -> _Pass:
    n = len(sb)
    boxes = sorted(set(boxes), key=_sort_key)
    owner = np.full(n, -1, dtype=np.int64)

    rows = sb.tolist()
    for bi, box in enumerate(boxes):
        run, val = best_sequence_for_box(box, rows, (owner >= 0).tolist())
        if run is not None and val > cfg.iou_threshold:
            owner[run.start : run.stop] = bi

    if boxes:
        runs = sorted(maximal_runs(owner >= 0), key=len, reverse=True)
        for run in runs:
            rb = AABB(*_union(sb, slice(run.start, run.stop)))
            j = _nearest(rb, boxes)
            if overlap_ratio(rb, AABB(*boxes[j])) > cfg.or_threshold:
                owner[run.start : run.stop] = j

    boxes = list(boxes)
    for run in maximal_runs(owner >= 0):
        boxes.append(_union(sb, slice(run.start, run.stop)))
        owner[run.start : run.stop] = len(boxes) - 1
    return _Pass(owner, boxes)


def _groups_of(owner: np.ndarray) -> dict[int, list[int]]:
    members: dict[int, list[int]] = {}
    for i, o in enumerate(owner.tolist()):
        members.setdefault(o, []).append(i)
    return members


def _canonical(owner: np.ndarray) -> tuple[int, ...]:
    # owners relabelled by first appearance; equal tuples mean equal partitions
    seen: dict[int, int] = {}
    return tuple(seen.setdefault(o, len(seen)) for o in owner.tolist())


def segment(
    strokes: Sequence[Stroke] | Scene,
    detections: DetectionSet | Iterable[AABB],
    cfg: PipelineConfig = PipelineConfig(),
    scene_id: str = "",
    trace: list | None = None,
) -> SegmentationResult:
    """Group strokes into object instances guided by detector boxes.

    Args:
        strokes: strokes sorted by temporal order, or a whole :class:`Scene`.
        detections: detector output; scores are ignored.
        cfg: thresholds and iteration cap.
        scene_id: copied into the result.
        trace: if given, the grouping after each outer iteration is appended
            to it as a frozenset of frozensets.

    Returns:
        A result whose groups partition every stroke index, ordered by their
        smallest member.
    """
    if not isinstance(cfg, PipelineConfig):
        raise TypeError("cfg must be a PipelineConfig")
    if isinstance(strokes, Scene):
        scene_id = scene_id or (strokes.scene_id or "")
        strokes = strokes.strokes
    boxes_in = detections.boxes if isinstance(detections, DetectionSet) else list(detections)
    n = len(strokes)
    if n == 0:
        return SegmentationResult(scene_id, (), cfg, 0, True)

    sb = stroke_boxes(strokes)
    boxes = [_as_box_tuple(b) for b in boxes_in]
    prev = None
    converged = False
    members: dict[int, list[int]] = {}
    iterations = 0
    for iterations in range(1, int(cfg.num_repeats) + 1):
        p = _one_pass(sb, boxes, cfg)
        members = _groups_of(p.owner)
        boxes = [_union(sb, members[j]) for j in sorted(members)]
        if trace is not None:
            trace.append(frozenset(frozenset(m) for m in members.values()))
        labels = _canonical(p.owner)
        if labels == prev:
            converged = True
            break
        prev = labels

    groups = sorted(members.values(), key=lambda m: m[0])
    out = tuple(StrokeGroup(frozenset(m), AABB(*_union(sb, m))) for m in groups)
    return SegmentationResult(scene_id, out, cfg, iterations, converged)


# --------------------------------------------------------------------------- #
# batches


def vector_size(scene: Scene) -> int:
    """Bytes of the scene's strokes in the JSON vector format (annotations excluded)."""
    bare = Scene(scene.canvas_w, scene.canvas_h, scene.strokes, None, scene.scene_id)
    return len(dumps_scene(bare).encode("utf-8"))


@dataclass
class BatchReport:
    results: list[SegmentationResult]
    wall_times: list[float]
    scene_bytes: list[int]
    peak_bytes: list[int] | None = None
    extra: dict = field(default_factory=dict)

    @property
    def mean_time(self) -> float:
        return statistics.fmean(self.wall_times) if self.wall_times else 0.0

    @property
    def median_time(self) -> float:
        return statistics.median(self.wall_times) if self.wall_times else 0.0

    @property
    def memory_ratios(self) -> list[float] | None:
        if self.peak_bytes is None:
            return None
        return [p / s for p, s in zip(self.peak_bytes, self.scene_bytes)]

    def summary(self) -> dict:
        out = {
            "scenes": len(self.results),
            "mean_ms": 1e3 * self.mean_time,
            "median_ms": 1e3 * self.median_time,
            "mean_scene_bytes": statistics.fmean(self.scene_bytes) if self.scene_bytes else 0.0,
        }
        if self.peak_bytes is not None:
            out["max_peak_bytes"] = max(self.peak_bytes, default=0)
            out["max_memory_ratio"] = max(self.memory_ratios, default=0.0)
        return out


def _timed(args):
    scene, dets, cfg, measure_memory = args
    t0 = time.perf_counter()
    res = segment(scene, dets, cfg)
    dt = time.perf_counter() - t0
    peak = None
    if measure_memory:
        # separate run: tracemalloc slows allocation and would skew the timing
        was_tracing = tracemalloc.is_tracing()
        if not was_tracing:
            tracemalloc.start()
        base, _ = tracemalloc.get_traced_memory()
        tracemalloc.reset_peak()
        segment(scene, dets, cfg)
        _, top = tracemalloc.get_traced_memory()
        peak = top - base
        if not was_tracing:
            tracemalloc.stop()
    return res, dt, peak


def segment_batch(
    scenes: Sequence[Scene],
    detections: Sequence[DetectionSet],
    cfg: PipelineConfig = PipelineConfig(),
    *,
    jobs: int = 1,
    measure_memory: bool = False,
) -> BatchReport:
    """Segment every scene with its detection set and time each call.

    Peak memory, when requested, is the tracemalloc high-water mark of a
    second ``segment`` call over what was allocated before it.
    """
    if len(scenes) != len(detections):
        raise ValueError(f"{len(scenes)} scenes but {len(detections)} detection sets")
    tasks = [(s, d, cfg, measure_memory) for s, d in zip(scenes, detections)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, os.cpu_count() or 1)) as ex:
            out = list(ex.map(_timed, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        out = [_timed(t) for t in tasks]
    return BatchReport(
        results=[r for r, _, _ in out],
        wall_times=[t for _, t, _ in out],
        scene_bytes=[vector_size(s) for s in scenes],
        peak_bytes=[p for _, _, p in out] if measure_memory else None,
    )
