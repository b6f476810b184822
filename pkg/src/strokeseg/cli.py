"""Command line entry point: ``strokeseg <command> ...``.

Commands: compose, segment, evaluate, tune, render, rasterize. ``--seed``,
``--jobs`` and ``--config FILE`` work with every command; the config file is
a JSON object using PipelineConfig / ComposerConfig field names, and explicit
flags override it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import fields
from pathlib import Path

from . import __version__
from .composer import ComposerConfig, compose_dataset
from .detect import JitterConfig, cluster_boxes, jittered_oracle, oracle_boxes
from .doodles import doodle_pool
from .geometry import PipelineConfig
from .metrics import METRIC_KEYS, evaluate, mean_report
from .postproc import segment
from .raster import rasterize_scene, render_svg
from .sketch_io import (
    SketchParseError,
    atomic_write_bytes,
    atomic_write_text,
    load_boxes,
    load_quickdraw,
    load_scene,
    load_segmentation,
    save_segmentation,
)
from .tune import GridSpec, grid_search

log = logging.getLogger("strokeseg")


class CliError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (default 0)")
    p.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="worker processes (default 1)")
    p.add_argument("--config", type=Path, default=argparse.SUPPRESS, help="JSON file of config fields")
    p.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    return p


def _pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--iou-threshold", type=float)
    p.add_argument("--or-threshold", type=float)
    p.add_argument("--num-repeats", type=int)
    p.add_argument("--stroke-thickness", type=int)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(","))


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="strokeseg", description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compose", parents=[common], help="generate synthetic scenes")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--pool", type=Path, help="QuickDraw simplified NDJSON (default: built-in doodles)")
    p.add_argument("--png", action="store_true", help="also write temporally coloured PNGs")
    p.add_argument("--split", type=int, nargs=2, metavar=("TRAIN", "VAL"))
    p.add_argument("--min-objects", type=int)
    p.add_argument("--max-objects", type=int)
    p.add_argument("--min-large-side", type=float)
    p.add_argument("--max-large-side", type=float)
    p.add_argument("--max-pair-iou", type=float)
    p.add_argument("--max-place-attempts", type=int)
    p.add_argument("--stroke-thickness", type=int)

    p = sub.add_parser("segment", parents=[common], help="group a scene's strokes into instances")
    p.add_argument("scene", type=Path)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--boxes", type=Path, help="detection JSON")
    src.add_argument("--detector", choices=("oracle", "jitter", "cluster"))
    p.add_argument("--sigma", type=float, default=0.0, help="jitter detector edge noise (px)")
    p.add_argument("--gap", type=float, default=20.0, help="cluster detector gap threshold (px)")
    p.add_argument("-o", "--out", type=Path, required=True)
    _pipeline_flags(p)

    p = sub.add_parser("evaluate", parents=[common], help="score segmentations against ground truth")
    p.add_argument("scenes", type=Path, nargs="+")
    p.add_argument("--pred", type=Path, nargs="+", required=True, help="segmentation JSON, one per scene")
    p.add_argument("--thickness", type=int, default=2)
    p.add_argument("-o", "--out", type=Path, help="JSON report (default: stdout)")
    p.add_argument("--csv", type=Path, help="per-scene CSV rows")

    p = sub.add_parser("tune", parents=[common], help="grid-search post-processor settings")
    p.add_argument("--set", dest="sets", action="append", required=True, metavar="NAME=SCENE_DIR",
                   help="validation set; repeatable")
    p.add_argument("--boxes-dir", action="append", default=[], metavar="NAME=DIR",
                   help="detections per scene stem for a set (default: jittered oracle)")
    p.add_argument("--sigma", type=float, default=0.0, help="jitter for generated detections (px)")
    p.add_argument("--iou-thresholds", type=_floats)
    p.add_argument("--or-thresholds", type=_floats)
    p.add_argument("--num-repeats-options", type=_ints)
    p.add_argument("--thickness-options", type=_ints)
    p.add_argument("--out", type=Path, required=True, help="output prefix; writes PREFIX.json and PREFIX.csv")

    p = sub.add_parser("render", parents=[common], help="SVG of a segmentation (or the ground truth)")
    p.add_argument("scene", type=Path)
    p.add_argument("--pred", type=Path)
    p.add_argument("-o", "--out", type=Path, required=True)

    p = sub.add_parser("rasterize", parents=[common], help="PNG of a scene")
    p.add_argument("scene", type=Path)
    p.add_argument("--mode", choices=("colored", "binary"), default="colored")
    p.add_argument("--stroke-thickness", type=int)
    p.add_argument("-o", "--out", type=Path, required=True)
    return parser


# --------------------------------------------------------------------------- #


def _load_config(args) -> dict:
    path = getattr(args, "config", None)
    if path is None:
        return {}
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, dict):
        raise CliError(f"{path}: config must be a JSON object")
    return doc


def _pick(cls, conf: dict, args) -> dict:
    out = {}
    for f in fields(cls):
        if f.name in conf:
            out[f.name] = conf[f.name]
        v = getattr(args, f.name, None)
        if v is not None:
            out[f.name] = v
    return out


def pipeline_config(args, conf: dict) -> PipelineConfig:
    return PipelineConfig(**_pick(PipelineConfig, conf, args))


def composer_config(args, conf: dict) -> ComposerConfig:
    kw = _pick(ComposerConfig, conf, args)
    if "canvas_options" in kw:
        kw["canvas_options"] = tuple(tuple(c) for c in kw["canvas_options"])
    kw["seed"] = getattr(args, "seed", conf.get("seed", 0))
    return ComposerConfig(**kw)


def _detections(kind, scene, args):
    if kind == "oracle":
        return oracle_boxes(scene)
    if kind == "jitter":
        return jittered_oracle(scene, JitterConfig(sigma=args.sigma, seed=getattr(args, "seed", 0)))
    return cluster_boxes(scene, args.gap)


def cmd_compose(args, conf) -> None:
    cfg = composer_config(args, conf)
    pool = load_quickdraw(args.pool) if args.pool else doodle_pool(seed=cfg.seed)
    thickness = args.stroke_thickness or conf.get("stroke_thickness", 2)
    manifest = compose_dataset(
        pool, cfg, args.count, args.out,
        write_png=args.png, thickness=thickness,
        split=tuple(args.split) if args.split else None,
        jobs=getattr(args, "jobs", 1),
    )
    for name, ids in manifest.splits.items():
        log.info("%s: %d scenes", name, len(ids))


def cmd_segment(args, conf) -> None:
    scene = load_scene(args.scene)
    cfg = pipeline_config(args, conf)
    dets = load_boxes(args.boxes, scene) if args.boxes else _detections(args.detector, scene, args)
    save_segmentation(segment(scene, dets, cfg), args.out)


def cmd_evaluate(args, conf) -> None:
    if len(args.scenes) != len(args.pred):
        raise CliError(f"{len(args.scenes)} scenes but {len(args.pred)} predictions")
    rows = []
    for sp, pp in zip(args.scenes, args.pred):
        rows.append(evaluate(load_scene(sp), load_segmentation(pp), args.thickness))
    report = {"scenes": rows, "mean": mean_report(rows)}
    if len(rows) == 1:
        report.update({k: rows[0][k] for k in METRIC_KEYS})
    text = json.dumps(report, indent=1) + "\n"
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    if args.csv:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["scene_id", *METRIC_KEYS], lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        atomic_write_text(args.csv, buf.getvalue())


def _named(pairs: list[str], flag: str) -> dict[str, Path]:
    out = {}
    for item in pairs:
        name, sep, path = item.partition("=")
        if not sep or not name:
            raise CliError(f"{flag} expects NAME=PATH, got {item!r}")
        out[name] = Path(path)
    return out


def cmd_tune(args, conf) -> None:
    sets = _named(args.sets, "--set")
    boxes = _named(args.boxes_dir, "--boxes-dir")
    unknown = set(boxes) - set(sets)
    if unknown:
        raise CliError(f"--boxes-dir for unknown sets {sorted(unknown)}")
    seed = getattr(args, "seed", 0)
    validation = {}
    for name, d in sets.items():
        files = sorted(d.glob("*.json"))
        if not files:
            raise CliError(f"set {name!r}: no scene files in {d}")
        items = []
        for k, f in enumerate(files):
            scene = load_scene(f)
            if name in boxes:
                dets = load_boxes(boxes[name] / f.name, scene)
            else:
                dets = jittered_oracle(scene, JitterConfig(sigma=args.sigma, seed=seed + k))
            items.append((scene, dets))
        validation[name] = items
    default = GridSpec()
    grid = GridSpec(
        args.iou_thresholds or default.iou_thresholds,
        args.or_thresholds or default.or_thresholds,
        args.num_repeats_options or default.num_repeats_options,
        args.thickness_options or default.thickness_options,
    )
    report = grid_search(validation, grid, jobs=getattr(args, "jobs", 1))
    atomic_write_text(args.out.with_suffix(".json"), report.to_json())
    atomic_write_text(args.out.with_suffix(".csv"), report.to_csv())
    log.info("evaluated %d configurations; best %s", len(report.rows), report.best)


def cmd_render(args, conf) -> None:
    scene = load_scene(args.scene)
    if args.pred:
        groups = load_segmentation(args.pred).groups
    elif scene.gt_instances is not None:
        groups = scene.gt_instances
    else:
        raise CliError("scene has no instances; pass --pred")
    atomic_write_text(args.out, render_svg(scene, groups))


def cmd_rasterize(args, conf) -> None:
    scene = load_scene(args.scene)
    thickness = args.stroke_thickness or conf.get("stroke_thickness", 2)
    atomic_write_bytes(args.out, rasterize_scene(scene, thickness, args.mode).to_png())


COMMANDS = {
    "compose": cmd_compose,
    "segment": cmd_segment,
    "evaluate": cmd_evaluate,
    "tune": cmd_tune,
    "render": cmd_render,
    "rasterize": cmd_rasterize,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        conf = _load_config(args)
        COMMANDS[args.command](args, conf)
    except (OSError, ValueError, CliError, SketchParseError, json.JSONDecodeError) as e:
        print(f"strokeseg {args.command}: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
