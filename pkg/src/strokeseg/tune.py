"""Exhaustive grid search over post-processor settings.

The objective of a configuration is the unweighted mean of AoN and S-IoU
over every validation set (2 numbers per set). ``stroke_thickness`` changes
only the raster fed to a detector, so with fixed detections it never changes
the grouping; it is still enumerated so reports cover the full grid.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .geometry import PipelineConfig, Scene
from .metrics import aon, s_iou
from .postproc import segment
from .sketch_io import DetectionSet

ValidationSets = Mapping[str, Sequence[tuple[Scene, DetectionSet]]]


def _pct_range(lo: int, hi: int, step: int) -> tuple[float, ...]:
    return tuple(v / 100 for v in range(lo, hi + 1, step))


@dataclass(frozen=True)
class GridSpec:
    iou_thresholds: tuple[float, ...] = _pct_range(25, 85, 10)
    or_thresholds: tuple[float, ...] = _pct_range(30, 80, 5)
    num_repeats_options: tuple[int, ...] = (1, 3, 5, 7, 9)
    thickness_options: tuple[int, ...] = (1, 2, 3, 4)

    def __post_init__(self):
        for name in ("iou_thresholds", "or_thresholds", "num_repeats_options", "thickness_options"):
            vals = tuple(getattr(self, name))
            if not vals:
                raise ValueError(f"{name} is empty")
            object.__setattr__(self, name, vals)
        if not all(0.0 <= v <= 1.0 for v in self.iou_thresholds + self.or_thresholds):
            raise ValueError("thresholds must lie in [0, 1]")
        if not all(int(v) == v >= 1 for v in self.num_repeats_options + self.thickness_options):
            raise ValueError("num_repeats and thickness options must be positive integers")

    @property
    def size(self) -> int:
        return (
            len(self.iou_thresholds)
            * len(self.or_thresholds)
            * len(self.num_repeats_options)
            * len(self.thickness_options)
        )

    def configs(self):
        for t, o, r, th in itertools.product(
            self.iou_thresholds, self.or_thresholds, self.num_repeats_options, self.thickness_options
        ):
            yield PipelineConfig(t, o, r, th)


@dataclass(frozen=True)
class TuneRow:
    config: PipelineConfig
    aon: dict[str, float]
    s_iou: dict[str, float]
    average: float


@dataclass
class TuneReport:
    rows: list[TuneRow]
    best: PipelineConfig

    def to_json(self) -> str:
        doc = {
            "best": self.best.as_dict(),
            "rows": [
                {**r.config.as_dict(), "aon": r.aon, "s_iou": r.s_iou, "average": r.average} for r in self.rows
            ],
        }
        return json.dumps(doc, indent=1) + "\n"

    def to_csv(self) -> str:
        names = sorted(self.rows[0].aon) if self.rows else []
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(
            ["iou_threshold", "or_threshold", "num_repeats", "stroke_thickness"]
            + [f"{n}_{m}" for n in names for m in ("aon", "s_iou")]
            + ["average"]
        )
        for r in self.rows:
            c = r.config
            vals = [x for n in names for x in (r.aon[n], r.s_iou[n])]
            w.writerow([c.iou_threshold, c.or_threshold, c.num_repeats, c.stroke_thickness, *vals, r.average])
        return buf.getvalue()


def _rank_key(row: TuneRow):
    c = row.config
    return (-row.average, -c.iou_threshold, -c.or_threshold, c.num_repeats, c.stroke_thickness)


def _score_pair(args):
    """AoN/S-IoU per set for one (iou, or) pair and every num_repeats option."""
    iou_t, or_t, repeats, sets = args
    cap = max(repeats)
    cfg = PipelineConfig(iou_t, or_t, cap)
    per_r = {r: ({}, {}) for r in repeats}
    for name, items in sets:
        acc = {r: ([], []) for r in repeats}
        for scene, dets in items:
            trace: list = []
            segment(scene, dets, cfg, trace=trace)
            gt = scene.gt_instances
            for r in repeats:
                # the first r passes do not depend on the cap
                grouping = trace[min(r, len(trace)) - 1]
                acc[r][0].append(aon(gt, grouping))
                acc[r][1].append(s_iou(gt, grouping))
        for r in repeats:
            per_r[r][0][name] = statistics.fmean(acc[r][0])
            per_r[r][1][name] = statistics.fmean(acc[r][1])
    return iou_t, or_t, per_r


def grid_search(validation: ValidationSets, grid: GridSpec = GridSpec(), jobs: int = 1) -> TuneReport:
    """Score every configuration in ``grid`` and rank them, best first.

    Ties on the objective prefer a higher IoU threshold, then a higher
    overlap threshold, then fewer repeats, then thinner strokes.
    """
    if not validation:
        raise ValueError("no validation sets")
    for name, items in validation.items():
        if not items:
            raise ValueError(f"validation set {name!r} is empty")
        for scene, _ in items:
            if scene.gt_instances is None:
                raise ValueError(f"validation set {name!r} has a scene without ground truth")
    sets = tuple((name, tuple(items)) for name, items in validation.items())
    repeats = tuple(sorted(set(grid.num_repeats_options)))
    tasks = [(t, o, repeats, sets) for t in grid.iou_thresholds for o in grid.or_thresholds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            scored = list(ex.map(_score_pair, tasks))
    else:
        scored = [_score_pair(t) for t in tasks]
    table = {(t, o): per_r for t, o, per_r in scored}

    rows = []
    for cfg in grid.configs():
        a, s = table[(cfg.iou_threshold, cfg.or_threshold)][cfg.num_repeats]
        avg = float(np.mean([*a.values(), *s.values()]))
        rows.append(TuneRow(cfg, dict(a), dict(s), avg))
    rows.sort(key=_rank_key)
    return TuneReport(rows, rows[0].config)
