"""Synthetic scene composition from single-object sketches.

Each scene picks 2..8 pool sketches, scales each to a random large side in
[50, 700] px, and rejection-samples a position on a 720x1280 or 1280x720
canvas so that no two placed objects overlap by box IoU 0.35 or more. Object
strokes stay contiguous in time: object *j* is drawn completely before
object *j+1*.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .geometry import AABB, Point, Scene, Stroke, StrokeGroup, bbox_of_strokes, iou
from .raster import rasterize_scene
from .sketch_io import SingleSketch, atomic_write_bytes, dumps_scene, export_coco_annotations

log = logging.getLogger(__name__)


class DegenerateSketchError(ValueError):
    pass


@dataclass(frozen=True)
class ComposerConfig:
    min_objects: int = 2
    max_objects: int = 8
    min_large_side: float = 50.0
    max_large_side: float = 700.0
    max_pair_iou: float = 0.35
    canvas_options: tuple[tuple[int, int], ...] = ((720, 1280), (1280, 720))
    max_place_attempts: int = 100
    max_scene_attempts: int = 10
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "canvas_options", tuple(tuple(int(v) for v in c) for c in self.canvas_options))
        if not 1 <= self.min_objects <= self.max_objects:
            raise ValueError("need 1 <= min_objects <= max_objects")
        if not 0 < self.min_large_side <= self.max_large_side:
            raise ValueError("need 0 < min_large_side <= max_large_side")
        if not 0.0 <= self.max_pair_iou <= 1.0:
            raise ValueError("max_pair_iou must lie in [0, 1]")
        if not self.canvas_options:
            raise ValueError("canvas_options is empty")
        if min(min(c) for c in self.canvas_options) < self.max_large_side:
            raise ValueError("max_large_side does not fit every canvas option")
        if self.max_place_attempts < 1 or self.max_scene_attempts < 1:
            raise ValueError("attempt budgets must be positive")


def normalize_object(sketch: SingleSketch, target_large_side: float) -> SingleSketch:
    """Scale uniformly so the larger box side equals ``target_large_side``; anchor at the origin."""
    box = bbox_of_strokes(sketch.strokes)
    extent = box.large_side
    if extent <= 0:
        raise DegenerateSketchError(f"degenerate sketch {sketch.class_label!r}: all points identical")
    s = target_large_side / extent
    limit_x = box.width * s
    limit_y = box.height * s

    def tx(v, lo, limit):
        # clamp away float drift so the scaled extent never exceeds the target
        return min((v - lo) * s, limit)

    strokes = tuple(
        Stroke(tuple(Point(tx(x, box.x_min, limit_x), tx(y, box.y_min, limit_y)) for x, y in st.points), st.order)
        for st in sketch.strokes
    )
    return SingleSketch(sketch.class_label, strokes)


def _pair_ok(candidate: AABB, placed: Sequence[AABB], max_pair_iou: float) -> bool:
    for b in placed:
        v = iou(candidate, b)
        # disjoint boxes are always acceptable, which makes max_pair_iou=0 mean "no overlap"
        if v != 0.0 and v >= max_pair_iou:
            return False
    return True


def _place_objects(pool, cfg: ComposerConfig, rng: np.random.Generator, canvas_w: int, canvas_h: int):
    k = int(rng.integers(cfg.min_objects, cfg.max_objects + 1))
    placed_boxes: list[AABB] = []
    strokes: list[Stroke] = []
    instances: list[tuple[range, str]] = []
    for _ in range(k):
        src = pool[int(rng.integers(len(pool)))]
        target = float(rng.uniform(cfg.min_large_side, cfg.max_large_side))
        obj = normalize_object(src, target)
        w = max(x for s in obj.strokes for x, _ in s.points)
        h = max(y for s in obj.strokes for _, y in s.points)
        for _attempt in range(cfg.max_place_attempts):
            ox = float(rng.uniform(0.0, canvas_w - w))
            oy = float(rng.uniform(0.0, canvas_h - h))
            moved = [
                Stroke(tuple(Point(min(x + ox, canvas_w), min(y + oy, canvas_h)) for x, y in s.points), 0)
                for s in obj.strokes
            ]
            box = bbox_of_strokes(moved)
            if _pair_ok(box, placed_boxes, cfg.max_pair_iou):
                break
        else:
            continue
        start = len(strokes)
        strokes.extend(s.with_order(start + j) for j, s in enumerate(moved))
        instances.append((range(start, len(strokes)), obj.class_label))
        placed_boxes.append(box)
    return k, strokes, instances


def compose_scene(
    pool: Sequence[SingleSketch],
    cfg: ComposerConfig = ComposerConfig(),
    rng: np.random.Generator | int | None = None,
    scene_id: str | None = None,
) -> Scene:
    """Compose one scene with ground-truth instances.

    An object that finds no valid position within ``cfg.max_place_attempts``
    draws is dropped. If drops leave fewer than ``cfg.min_objects`` instances
    the whole draw is repeated, up to ``cfg.max_scene_attempts`` times, and the
    draw with the most instances is kept (with a warning).
    """
    if not pool:
        raise ValueError("sketch pool is empty")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(cfg.seed if rng is None else rng)
    canvas_w, canvas_h = cfg.canvas_options[int(rng.integers(len(cfg.canvas_options)))]
    best = None
    for _ in range(cfg.max_scene_attempts):
        k, strokes, instances = _place_objects(pool, cfg, rng, canvas_w, canvas_h)
        if best is None or len(instances) > len(best[2]):
            best = (k, strokes, instances)
        if len(instances) >= cfg.min_objects:
            break
    k, strokes, instances = best
    if len(instances) < k:
        log.warning("scene %s: placed %d of %d objects within %d attempts each",
                    scene_id, len(instances), k, cfg.max_place_attempts)
    if not instances:
        raise RuntimeError("no object could be placed")
    gt = tuple(StrokeGroup.from_strokes(r, strokes, label) for r, label in instances)
    return Scene(canvas_w, canvas_h, tuple(strokes), gt, scene_id=scene_id)


def scene_seed(seed: int, index: int) -> np.random.Generator:
    """Independent generator for scene ``index``; reproducible without its neighbours."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), int(index)]))


def compose_many(pool, cfg: ComposerConfig, count: int, start: int = 0, prefix: str = "scene") -> list[Scene]:
    return [
        compose_scene(pool, cfg, scene_seed(cfg.seed, i), scene_id=f"{prefix}_{i:06d}")
        for i in range(start, start + count)
    ]


def _write_one(args) -> Scene:
    pool, cfg, i, scene_dir, png_dir, thickness = args
    scene = compose_scene(pool, cfg, scene_seed(cfg.seed, i), scene_id=f"scene_{i:06d}")
    atomic_write_bytes(Path(scene_dir) / f"{scene.scene_id}.json", dumps_scene(scene).encode("utf-8"))
    if png_dir is not None:
        png = rasterize_scene(scene, thickness, "colored").to_png()
        atomic_write_bytes(Path(png_dir) / f"{scene.scene_id}.png", png)
    return scene


@dataclass
class DatasetManifest:
    out_dir: Path
    splits: dict[str, list[str]] = field(default_factory=dict)


def compose_dataset(
    pool: Sequence[SingleSketch],
    cfg: ComposerConfig,
    count: int,
    out_dir: str | os.PathLike,
    *,
    write_png: bool = False,
    thickness: int = 2,
    split: tuple[int, int] | None = None,
    jobs: int = 1,
) -> DatasetManifest:
    """Write ``count`` scenes (plus optional PNGs and a COCO file per split).

    Layout without ``split``: ``out_dir/scenes/*.json``, ``out_dir/images/*.png``
    and ``out_dir/annotations.json``. With ``split=(n_train, n_val)`` the same
    layout appears under ``out_dir/train`` and ``out_dir/val``; scene indices
    run on continuously so every scene is still reproducible from its index.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    out = Path(out_dir)
    if split is not None:
        if sum(split) != count:
            raise ValueError(f"split {split} does not add up to count {count}")
        parts = {"train": (0, split[0]), "val": (split[0], split[1])}
    else:
        parts = {"": (0, count)}
    manifest = DatasetManifest(out)
    for name, (start, n) in parts.items():
        root = out / name if name else out
        scene_dir = root / "scenes"
        png_dir = root / "images" if write_png else None
        scene_dir.mkdir(parents=True, exist_ok=True)
        if png_dir is not None:
            png_dir.mkdir(parents=True, exist_ok=True)
        tasks = [(pool, cfg, i, scene_dir, png_dir, thickness) for i in range(start, start + n)]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as ex:
                scenes = list(ex.map(_write_one, tasks, chunksize=max(1, n // (4 * jobs))))
        else:
            scenes = [_write_one(t) for t in tasks]
        export_coco_annotations(scenes, "images", root / "annotations.json")
        manifest.splits[name or "all"] = [s.scene_id for s in scenes]
    return manifest
