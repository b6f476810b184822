"""Readers and writers for the on-disk formats.

Formats (all UTF-8 JSON):

* QuickDraw *simplified* NDJSON, one sketch per line:
  ``{"word": "cat", "drawing": [[xs...], [ys...]], ...]}``. Read only.
* Scene documents::

      {"id": "...", "canvas": {"width": W, "height": H},
       "strokes": [{"order": 0, "points": [[x, y], ...]}, ...],
       "instances": [{"id": 0, "class": "cat", "stroke_indices": [0, 1]}, ...]}

  ``id`` and ``instances`` are optional. This layout is our own interchange
  format, not one published with any dataset.
* Detection documents: ``{"boxes": [{"x_min", "y_min", "x_max", "y_max", "score"}]}``.
* Segmentation documents: ``{"scene_id", "config", "iterations", "groups": [...]}``.
* COCO-style class-agnostic annotation files. Write only.

Unknown keys are ignored on read and never written back.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path, PurePosixPath
from typing import IO, Iterable, Sequence

from .geometry import (
    AABB,
    PipelineConfig,
    Scene,
    Stroke,
    StrokeGroup,
    bbox_of_strokes,
    check_partition,
)

log = logging.getLogger(__name__)


class SketchParseError(ValueError):
    """Malformed input document; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class SingleSketch:
    class_label: str
    strokes: tuple[Stroke, ...]

    def __post_init__(self):
        if not self.class_label:
            raise ValueError("sketch label must be non-empty")
        if not self.strokes:
            raise ValueError("sketch has no strokes")
        object.__setattr__(self, "strokes", tuple(self.strokes))


@dataclass(frozen=True)
class Detection:
    box: AABB
    score: float = 1.0


@dataclass(frozen=True)
class DetectionSet:
    detections: tuple[Detection, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "detections", tuple(self.detections))

    @classmethod
    def from_boxes(cls, boxes: Iterable[AABB], score: float = 1.0) -> DetectionSet:
        return cls(tuple(Detection(b, score) for b in boxes))

    @property
    def boxes(self) -> list[AABB]:
        return [d.box for d in self.detections]

    def __len__(self) -> int:
        return len(self.detections)


@dataclass(frozen=True)
class SegmentationResult:
    scene_id: str
    groups: tuple[StrokeGroup, ...]
    config_used: PipelineConfig
    iterations: int = 0
    converged: bool = True

    def grouping(self) -> frozenset[frozenset[int]]:
        return frozenset(g.stroke_indices for g in self.groups)


# --------------------------------------------------------------------------- #
# serialization helpers


def _num(v: float) -> int | float:
    v = float(v)
    if v.is_integer():
        return int(v)
    return v


def _dumps(doc) -> str:
    # Python's float repr is already the shortest round-trip form.
    return json.dumps(doc, ensure_ascii=False, separators=(",", ":"), allow_nan=False) + "\n"


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to ``path`` through a temp file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_bytes(path: str | os.PathLike, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_json(src) -> tuple[object, str | None]:
    """Load JSON from a path or an open text stream; also return a default id."""
    if hasattr(src, "read"):
        text = src.read()
        name = getattr(src, "name", None)
        stem = Path(name).stem if isinstance(name, str) else None
    else:
        p = Path(src)
        text = p.read_text(encoding="utf-8")
        stem = p.stem
    try:
        return json.loads(text), stem
    except json.JSONDecodeError as e:
        raise SketchParseError(f"invalid JSON: {e.msg}", e.lineno) from e


def _write(dest, text: str) -> None:
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        atomic_write_text(dest, text)


def _box_doc(box: AABB) -> dict:
    return {
        "x_min": _num(box.x_min),
        "y_min": _num(box.y_min),
        "x_max": _num(box.x_max),
        "y_max": _num(box.y_max),
    }


def _box_from_doc(d: dict, where: str) -> AABB:
    try:
        vals = [float(d[k]) for k in ("x_min", "y_min", "x_max", "y_max")]
    except (KeyError, TypeError, ValueError) as e:
        raise SketchParseError(f"{where}: bad box {d!r}") from e
    if vals[0] > vals[2] or vals[1] > vals[3]:
        raise SketchParseError(f"{where}: x_min > x_max or y_min > y_max in {d!r}")
    return AABB(*vals)


# --------------------------------------------------------------------------- #
# QuickDraw NDJSON


def parse_quickdraw_ndjson(stream: IO[str] | Iterable[str]) -> list[SingleSketch]:
    """Parse QuickDraw simplified NDJSON.

    Blank lines are ignored. Sketches whose ``drawing`` is empty are skipped
    and counted in a single warning.

    Raises:
        SketchParseError: on invalid JSON, a missing field, or ragged
            ``xs``/``ys`` arrays, naming the offending line.
    """
    sketches = []
    skipped = 0
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise SketchParseError(f"invalid JSON: {e.msg}", lineno) from e
        if not isinstance(rec, dict) or "word" not in rec or "drawing" not in rec:
            raise SketchParseError("expected an object with 'word' and 'drawing'", lineno)
        drawing = rec["drawing"]
        if not isinstance(drawing, list):
            raise SketchParseError("'drawing' must be a list", lineno)
        strokes = []
        for k, arr in enumerate(drawing):
            if not isinstance(arr, list) or len(arr) < 2:
                raise SketchParseError(f"stroke {k} must be [xs, ys]", lineno)
            xs, ys = arr[0], arr[1]
            if len(xs) != len(ys):
                raise SketchParseError(f"stroke {k} has {len(xs)} xs but {len(ys)} ys", lineno)
            if len(xs) == 0:
                raise SketchParseError(f"stroke {k} has no points", lineno)
            try:
                strokes.append(Stroke.from_xy(xs, ys, order=len(strokes)))
            except (TypeError, ValueError) as e:
                raise SketchParseError(f"stroke {k}: {e}", lineno) from e
        if not strokes:
            skipped += 1
            continue
        sketches.append(SingleSketch(str(rec["word"]), tuple(strokes)))
    if skipped:
        log.warning("skipped %d sketches with empty drawings", skipped)
    return sketches


def load_quickdraw(path: str | os.PathLike) -> list[SingleSketch]:
    with open(path, encoding="utf-8") as fh:
        return parse_quickdraw_ndjson(fh)


# --------------------------------------------------------------------------- #
# scenes


def scene_to_doc(scene: Scene) -> dict:
    doc: dict = {}
    if scene.scene_id is not None:
        doc["id"] = scene.scene_id
    doc["canvas"] = {"width": int(scene.canvas_w), "height": int(scene.canvas_h)}
    doc["strokes"] = [
        {"order": s.order, "points": [[_num(x), _num(y)] for x, y in s.points]} for s in scene.strokes
    ]
    if scene.gt_instances is not None:
        doc["instances"] = [
            {"id": k, "class": g.class_label, "stroke_indices": g.sorted_indices()}
            for k, g in enumerate(scene.gt_instances)
        ]
    return doc


def scene_from_doc(doc, default_id: str | None = None) -> Scene:
    if not isinstance(doc, dict):
        raise SketchParseError("scene document must be a JSON object")
    try:
        w = int(doc["canvas"]["width"])
        h = int(doc["canvas"]["height"])
        strokes = [Stroke(tuple(tuple(p) for p in s["points"]), int(s["order"])) for s in doc["strokes"]]
    except (KeyError, TypeError, ValueError) as e:
        raise SketchParseError(f"malformed scene: {e}") from e
    strokes.sort(key=lambda s: s.order)
    instances = None
    if doc.get("instances") is not None:
        groups = [sorted(int(i) for i in inst["stroke_indices"]) for inst in doc["instances"]]
        check_partition(groups, len(strokes))
        instances = tuple(
            StrokeGroup.from_strokes(idx, strokes, inst.get("class"))
            for idx, inst in zip(groups, doc["instances"])
        )
    scene_id = doc.get("id", default_id)
    try:
        return Scene(w, h, tuple(strokes), instances, scene_id=None if scene_id is None else str(scene_id))
    except ValueError as e:
        if isinstance(e, SketchParseError):
            raise
        raise SketchParseError(f"invalid scene: {e}") from e


def load_scene(src) -> Scene:
    """Read a scene from a path or text stream.

    The scene id is the document's ``id`` field, else the file stem.
    """
    doc, stem = _read_json(src)
    return scene_from_doc(doc, stem)


def dumps_scene(scene: Scene) -> str:
    return _dumps(scene_to_doc(scene))


def save_scene(scene: Scene, dest) -> None:
    _write(dest, dumps_scene(scene))


# --------------------------------------------------------------------------- #
# detections


def detections_from_doc(doc, canvas: tuple[int, int] | None = None) -> DetectionSet:
    if not isinstance(doc, dict) or not isinstance(doc.get("boxes"), list):
        raise SketchParseError("detection document must have a 'boxes' list")
    dets = []
    for k, b in enumerate(doc["boxes"]):
        box = _box_from_doc(b, f"box {k}")
        if canvas is not None:
            box = box.clip(*canvas)
        score = float(b.get("score", 1.0))
        dets.append(Detection(box, score))
    return DetectionSet(tuple(dets))


def load_boxes(src, canvas: tuple[int, int] | Scene | None = None) -> DetectionSet:
    """Read detector boxes, clipping them to ``canvas`` (``(w, h)`` or a scene)."""
    if isinstance(canvas, Scene):
        canvas = (canvas.canvas_w, canvas.canvas_h)
    doc, _ = _read_json(src)
    return detections_from_doc(doc, canvas)


def dumps_boxes(dets: DetectionSet) -> str:
    return _dumps({"boxes": [dict(_box_doc(d.box), score=_num(d.score)) for d in dets.detections]})


def save_boxes(dets: DetectionSet, dest) -> None:
    _write(dest, dumps_boxes(dets))


# --------------------------------------------------------------------------- #
# segmentation results


def segmentation_to_doc(result: SegmentationResult) -> dict:
    groups = []
    for k, g in enumerate(result.groups):
        entry = {"id": k, "stroke_indices": g.sorted_indices(), "box": _box_doc(g.box)}
        if g.class_label is not None:
            entry["class"] = g.class_label
        groups.append(entry)
    return {
        "scene_id": result.scene_id,
        "config": result.config_used.as_dict(),
        "iterations": result.iterations,
        "converged": result.converged,
        "groups": groups,
    }


def segmentation_from_doc(doc) -> SegmentationResult:
    try:
        cfg = PipelineConfig(**{k: doc["config"][k] for k in PipelineConfig().as_dict()})
        groups = tuple(
            StrokeGroup(frozenset(g["stroke_indices"]), _box_from_doc(g["box"], f"group {k}"), g.get("class"))
            for k, g in enumerate(doc["groups"])
        )
        return SegmentationResult(
            str(doc["scene_id"]), groups, cfg, int(doc.get("iterations", 0)), bool(doc.get("converged", True))
        )
    except (KeyError, TypeError) as e:
        raise SketchParseError(f"malformed segmentation document: {e}") from e


def dumps_segmentation(result: SegmentationResult) -> str:
    return _dumps(segmentation_to_doc(result))


def save_segmentation(result: SegmentationResult, dest) -> None:
    _write(dest, dumps_segmentation(result))


def load_segmentation(src) -> SegmentationResult:
    doc, _ = _read_json(src)
    return segmentation_from_doc(doc)


# --------------------------------------------------------------------------- #
# COCO export


def coco_document(scenes: Sequence[Scene], image_dir: str | None = None) -> dict:
    """Build a class-agnostic COCO annotation dict: every instance is an ``object``."""
    images, annotations = [], []
    for image_id, scene in enumerate(scenes):
        if scene.gt_instances is None:
            raise ValueError(f"scene {scene.scene_id or image_id} has no ground-truth instances")
        name = f"{scene.scene_id if scene.scene_id is not None else image_id}.png"
        if image_dir:
            name = str(PurePosixPath(image_dir) / name)
        images.append({"id": image_id, "file_name": name, "width": scene.canvas_w, "height": scene.canvas_h})
        for g in scene.gt_instances:
            box = bbox_of_strokes([scene.strokes[i] for i in g.sorted_indices()])
            annotations.append(
                {
                    "id": len(annotations),
                    "image_id": image_id,
                    "category_id": 1,
                    "bbox": [_num(v) for v in box.xywh()],
                    "area": _num(box.width * box.height),
                    "iscrowd": 0,
                }
            )
    return {
        "images": images,
        "annotations": annotations,
        "categories": [{"id": 1, "name": "object", "supercategory": "object"}],
    }


def export_coco_annotations(scenes: Sequence[Scene], image_dir: str | None, out_file) -> dict:
    doc = coco_document(scenes, image_dir)
    _write(out_file, _dumps(doc))
    return doc
