"""Stroke-level and pixel-level segmentation metrics.

Stroke metrics compare partitions of stroke indices:

* ``aon`` (all-or-nothing): share of ground-truth groups reproduced exactly.
* ``s_iou``: mean over ground-truth groups of the best set IoU with any
  predicted group.

Pixel metrics (overall accuracy, mean accuracy, mean IoU, frequency-weighted
IoU) are computed from label rasters over ground-truth ink pixels only;
background is not a class.
"""

from __future__ import annotations

import statistics
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .geometry import Scene, StrokeGroup, check_partition
from .raster import RasterImage, rasterize_scene
from .sketch_io import SegmentationResult

GroupLike = StrokeGroup | Iterable[int]


def _sets(groups: Iterable[GroupLike]) -> list[frozenset[int]]:
    return [g.stroke_indices if isinstance(g, StrokeGroup) else frozenset(g) for g in groups]


def _check_pair(gt: list[frozenset[int]], pred: list[frozenset[int]]) -> None:
    universe = frozenset().union(*gt) if gt else frozenset()
    n = max(universe) + 1 if universe else 0
    check_partition(gt, n)
    check_partition(pred, n)


def aon(gt: Sequence[GroupLike], pred: Sequence[GroupLike]) -> float:
    g, p = _sets(gt), _sets(pred)
    _check_pair(g, p)
    if not g:
        return 1.0
    pred_set = set(p)
    return sum(1 for s in g if s in pred_set) / len(g)


def s_iou(gt: Sequence[GroupLike], pred: Sequence[GroupLike]) -> float:
    g, p = _sets(gt), _sets(pred)
    _check_pair(g, p)
    if not g:
        return 1.0
    # each stroke belongs to exactly one predicted group, so only groups that
    # share a stroke with ``s`` can score above zero
    owner = {i: k for k, ps in enumerate(p) for i in ps}
    # exact rationals, rounded once, so the result does not depend on gt order
    total = Fraction(0)
    for s in g:
        best = Fraction(0)
        for k in {owner[i] for i in s}:
            inter = len(s & p[k])
            best = max(best, Fraction(inter, len(s) + len(p[k]) - inter))
        total += best
    return float(total / len(g))


@dataclass
class PixelMetricReport:
    ov_acc: float
    mean_acc: float
    m_iou: float
    fw_iou: float
    per_class: dict[int, tuple[float, float, int]] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"ov_acc": self.ov_acc, "mean_acc": self.mean_acc, "m_iou": self.m_iou, "fw_iou": self.fw_iou}


def pixel_metrics(gt_labels: RasterImage | np.ndarray, pred_labels: RasterImage | np.ndarray) -> PixelMetricReport:
    """Four standard pixel metrics over pixels whose ground-truth label is non-zero.

    ``per_class`` maps each label to ``(iou, recall, gt pixel count)``. Mean
    IoU averages every class seen in either raster on those pixels, so a class
    that is missed entirely contributes 0; mean accuracy averages over
    ground-truth classes only.
    """
    gt = gt_labels.pixels if isinstance(gt_labels, RasterImage) else np.asarray(gt_labels)
    pr = pred_labels.pixels if isinstance(pred_labels, RasterImage) else np.asarray(pred_labels)
    if gt.shape != pr.shape:
        raise ValueError(f"raster shapes differ: {gt.shape} vs {pr.shape}")
    fg = gt != 0
    total = int(fg.sum())
    if total == 0:
        raise ValueError("no foreground pixels in ground truth")
    g = gt[fg].astype(np.int64)
    p = pr[fg].astype(np.int64)
    classes = np.union1d(np.unique(g), np.unique(p))
    gi = np.searchsorted(classes, g)
    pi = np.searchsorted(classes, p)
    k = len(classes)
    conf = np.bincount(gi * k + pi, minlength=k * k).reshape(k, k)
    tp = np.diag(conf).astype(float)
    gt_count = conf.sum(axis=1).astype(float)
    pred_count = conf.sum(axis=0).astype(float)
    union = gt_count + pred_count - tp
    ious = tp / union
    present = gt_count > 0
    recall = np.zeros(k)
    recall[present] = tp[present] / gt_count[present]
    freq = gt_count / total
    per_class = {
        int(c): (float(ious[j]), float(recall[j]), int(gt_count[j])) for j, c in enumerate(classes)
    }
    return PixelMetricReport(
        ov_acc=float(tp.sum() / total),
        mean_acc=float(recall[present].mean()),
        m_iou=float(ious.mean()),
        fw_iou=float((freq[present] * ious[present]).sum()),
        per_class=per_class,
    )


def oracle_classify(pred: Sequence[StrokeGroup], gt: Sequence[StrokeGroup]) -> list[StrokeGroup]:
    """Label each predicted group with the majority ground-truth class of its strokes.

    Ties go to the class of the tied candidate's lowest stroke index.
    """
    cls_of = {}
    for g in gt:
        if g.class_label is None:
            raise ValueError("ground-truth group without class label")
        for i in g.stroke_indices:
            cls_of[i] = g.class_label
    out = []
    for g in pred:
        idx = g.sorted_indices()
        try:
            counts = Counter(cls_of[i] for i in idx)
        except KeyError as e:
            raise ValueError(f"stroke {e.args[0]} has no ground-truth class") from None
        top = max(counts.values())
        label = next(cls_of[i] for i in idx if counts[cls_of[i]] == top)
        out.append(g.with_label(label))
    return out


def class_ids(scene: Scene) -> dict[str, int]:
    """Stable label ids (1-based, sorted by name) for a scene's gt classes."""
    return {c: k + 1 for k, c in enumerate(sorted({g.class_label for g in scene.gt_instances}))}


def _per_stroke(groups: Sequence[StrokeGroup], ids: dict[str, int], n: int) -> list[int]:
    out = [0] * n
    for g in groups:
        for i in g.stroke_indices:
            out[i] = ids[g.class_label]
    return out


def evaluate(scene: Scene, result: SegmentationResult | Sequence[StrokeGroup], thickness: int = 2) -> dict:
    """AoN, S-IoU and the pixel metrics of one prediction against a scene's ground truth."""
    if scene.gt_instances is None:
        raise ValueError("scene has no ground-truth instances")
    groups = result.groups if isinstance(result, SegmentationResult) else tuple(result)
    check_partition(groups, scene.num_strokes)
    gt = scene.gt_instances
    pred = oracle_classify(groups, gt)
    ids = class_ids(scene)
    n = scene.num_strokes
    gt_raster = rasterize_scene(scene, thickness, "labels", _per_stroke(gt, ids, n))
    pred_raster = rasterize_scene(scene, thickness, "labels", _per_stroke(pred, ids, n))
    report = pixel_metrics(gt_raster, pred_raster)
    return {
        "scene_id": scene.scene_id,
        "aon": aon(gt, groups),
        "s_iou": s_iou(gt, groups),
        **report.as_dict(),
    }


METRIC_KEYS = ("aon", "s_iou", "ov_acc", "mean_acc", "m_iou", "fw_iou")


def mean_report(rows: Sequence[dict]) -> dict:
    """Dataset-level numbers as the arithmetic mean of per-scene values."""
    return {k: statistics.fmean(r[k] for r in rows) for k in METRIC_KEYS if rows}
