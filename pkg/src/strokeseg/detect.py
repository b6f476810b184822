"""Detector stand-ins that emit the same box sets a trained detector would."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .geometry import AABB, Scene, bbox_of_strokes, box_distance
from .sketch_io import Detection, DetectionSet


@dataclass(frozen=True)
class JitterConfig:
    sigma: float = 0.0
    drop_prob: float = 0.0
    merge_prob: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        for name in ("drop_prob", "merge_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")


def oracle_boxes(scene: Scene) -> DetectionSet:
    """One score-1 box per ground-truth instance, in instance order."""
    if scene.gt_instances is None:
        raise ValueError("scene has no ground-truth instances")
    return DetectionSet.from_boxes(
        bbox_of_strokes([scene.strokes[i] for i in g.sorted_indices()]) for g in scene.gt_instances
    )


def jittered_oracle(scene: Scene, cfg: JitterConfig, rng: np.random.Generator | None = None) -> DetectionSet:
    """Oracle boxes with Gaussian edge noise, random drops and random pair merges.

    Noise draws happen for every box even when it is later dropped, so for a
    fixed seed changing ``drop_prob`` does not reshuffle the other boxes.
    """
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    base = oracle_boxes(scene).boxes
    noise = rng.normal(0.0, 1.0, size=(len(base), 4)) * cfg.sigma
    drop = rng.random(len(base)) < cfg.drop_prob
    merge = rng.random(len(base)) < cfg.merge_prob
    boxes = []
    for b, e, dropped in zip(base, noise, drop):
        if dropped:
            continue
        x0, y0, x1, y1 = (v + d for v, d in zip(b.as_tuple(), e.tolist()))
        box = AABB(min(x0, x1), min(y0, y1), max(x0, x1), max(y0, y1)).clip(scene.canvas_w, scene.canvas_h)
        boxes.append(box)
    out = []
    k = 0
    while k < len(boxes):
        if k + 1 < len(boxes) and merge[k]:
            out.append(boxes[k].union(boxes[k + 1]))
            k += 2
        else:
            out.append(boxes[k])
            k += 1
    return DetectionSet(tuple(Detection(b, 1.0) for b in out))


def cluster_boxes(scene: Scene, gap_threshold: float) -> DetectionSet:
    """Single-linkage clusters of per-stroke boxes joined when their gap is <= ``gap_threshold``."""
    n = scene.num_strokes
    if n == 0:
        return DetectionSet()
    boxes = [bbox_of_strokes([s]) for s in scene.strokes]
    if math.isinf(gap_threshold):
        labels = np.zeros(n, dtype=int)
    else:
        rows, cols = [], []
        for i in range(n):
            for j in range(i + 1, n):
                if box_distance(boxes[i], boxes[j]) <= gap_threshold:
                    rows.append(i)
                    cols.append(j)
        adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
        _, labels = connected_components(adj, directed=False)
    clusters: dict[int, AABB] = {}
    for i, lab in enumerate(labels.tolist()):
        clusters[lab] = boxes[i] if lab not in clusters else clusters[lab].union(boxes[i])
    # dict insertion order is the order of each cluster's earliest stroke
    return DetectionSet.from_boxes(clusters.values())
