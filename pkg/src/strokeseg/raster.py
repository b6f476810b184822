"""Temporal colouring, bitmap rasterization and SVG rendering of scenes."""

from __future__ import annotations

import colorsys
import io
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence
from xml.sax.saxutils import quoteattr

import numpy as np
from PIL import Image

from .geometry import Scene, Stroke, StrokeGroup, check_partition

MODES = ("colored", "binary", "labels")

# tab20, in its usual order
PALETTE = (
    "#1f77b4", "#aec7e8", "#ff7f0e", "#ffbb78", "#2ca02c",
    "#98df8a", "#d62728", "#ff9896", "#9467bd", "#c5b0d5",
    "#8c564b", "#c49c94", "#e377c2", "#f7b6d2", "#7f7f7f",
    "#c7c7c7", "#bcbd22", "#dbdb8d", "#17becf", "#9edae5",
)  # fmt: skip


class RGB(NamedTuple):
    r: int
    g: int
    b: int


@dataclass(frozen=True, eq=False)
class RasterImage:
    """Row-major bitmap; ``pixels`` is ``(h, w, 3) uint8`` or ``(h, w)`` ints."""

    width: int
    height: int
    pixels: np.ndarray
    mode: str = "colored"

    def __eq__(self, other):
        if not isinstance(other, RasterImage):
            return NotImplemented
        return (
            self.mode == other.mode
            and self.pixels.shape == other.pixels.shape
            and bool(np.array_equal(self.pixels, other.pixels))
        )

    def to_png(self) -> bytes:
        arr = self.pixels
        if self.mode == "binary":
            # ink is black on white
            arr = np.where(arr > 0, 0, 255).astype(np.uint8)
        elif self.mode == "labels":
            arr = arr.astype(np.uint16) if arr.max(initial=0) > 255 else arr.astype(np.uint8)
        buf = io.BytesIO()
        Image.fromarray(arr).save(buf, format="PNG")
        return buf.getvalue()


def temporal_hue(i: int, n: int) -> float:
    """Hue in degrees: 240 (blue) for the first stroke down to 0 (red) for the last."""
    if n < 1 or not 0 <= i < n:
        raise ValueError(f"stroke index {i} out of range for {n} strokes")
    if n == 1:
        return 240.0
    return 240.0 * (1.0 - i / (n - 1))


def temporal_color(i: int, n: int) -> RGB:
    h = temporal_hue(i, n)
    r, g, b = colorsys.hsv_to_rgb(h / 360.0, 1.0, 1.0)
    return RGB(*(int(math.floor(c * 255 + 0.5)) for c in (r, g, b)))


def _round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def bresenham(x0: int, y0: int, x1: int, y1: int) -> list[tuple[int, int]]:
    """Integer pixels on the segment from ``(x0, y0)`` to ``(x1, y1)``, inclusive."""
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    out = []
    while True:
        out.append((x0, y0))
        if x0 == x1 and y0 == y1:
            return out
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def stroke_pixels(stroke: Stroke, thickness: int, width: int, height: int) -> tuple[np.ndarray, np.ndarray]:
    """Row and column indices of a stroke's ink, dilated by a ``thickness`` square."""
    pts = [(_round_half_up(x), _round_half_up(y)) for x, y in stroke.points]
    core = [pts[0]]
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        core.extend(bresenham(x0, y0, x1, y1)[1:])
    core = np.unique(np.asarray(core, dtype=np.int64), axis=0)
    offsets = np.arange(-(thickness // 2), thickness - thickness // 2)
    xs = (core[:, 0, None, None] + offsets[None, None, :]).repeat(len(offsets), axis=1).ravel()
    ys = (core[:, 1, None, None] + offsets[None, :, None]).repeat(len(offsets), axis=2).ravel()
    keep = (xs >= 0) & (xs < width) & (ys >= 0) & (ys < height)
    return ys[keep], xs[keep]


def rasterize_scene(
    scene: Scene,
    thickness: int = 2,
    mode: str = "colored",
    labels: Sequence[int] | None = None,
) -> RasterImage:
    """Draw a scene's strokes in temporal order; later strokes win at crossings.

    ``colored`` paints the temporal blue-to-red spectrum on white, ``binary``
    gives a 0/1 ink mask, and ``labels`` writes ``labels[i]`` for stroke ``i``
    on a zero background.
    """
    if thickness < 1 or int(thickness) != thickness:
        raise ValueError(f"thickness must be a positive integer, got {thickness}")
    if mode not in MODES:
        raise ValueError(f"unknown raster mode {mode!r}")
    w, h = int(scene.canvas_w), int(scene.canvas_h)
    n = scene.num_strokes
    if mode == "colored":
        img = np.full((h, w, 3), 255, dtype=np.uint8)
    elif mode == "binary":
        img = np.zeros((h, w), dtype=np.uint8)
    else:
        if labels is None or len(labels) != n:
            raise ValueError("labels mode needs one label per stroke")
        img = np.zeros((h, w), dtype=np.int32)
    for s in scene.strokes:
        rows, cols = stroke_pixels(s, int(thickness), w, h)
        if mode == "colored":
            img[rows, cols] = temporal_color(s.order, n)
        elif mode == "binary":
            img[rows, cols] = 1
        else:
            img[rows, cols] = labels[s.order]
    return RasterImage(w, h, img, mode)


def _fmt(v: float) -> str:
    v = float(v)
    return str(int(v)) if v.is_integer() else repr(v)


def _path_d(stroke: Stroke) -> str:
    pts = stroke.points
    if len(pts) == 1:
        pts = pts * 2
    head = f"M{_fmt(pts[0].x)} {_fmt(pts[0].y)}"
    return head + "".join(f" L{_fmt(x)} {_fmt(y)}" for x, y in pts[1:])


def render_svg(scene: Scene, groups: Sequence[StrokeGroup], stroke_width: float = 2) -> str:
    """SVG with one ``<g>`` per group and one ``<path>`` per stroke.

    Group ``k`` is drawn in ``PALETTE[k % 20]``.
    """
    check_partition(groups, scene.num_strokes)
    w, h = int(scene.canvas_w), int(scene.canvas_h)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="#ffffff"/>',
    ]
    for k, g in enumerate(groups):
        attrs = f'id="instance-{k}" fill="none" stroke="{PALETTE[k % len(PALETTE)]}" stroke-width="{_fmt(stroke_width)}" stroke-linecap="round" stroke-linejoin="round"'
        if g.class_label is not None:
            attrs += f" data-class={quoteattr(g.class_label)}"
        lines.append(f"<g {attrs}>")
        for i in g.sorted_indices():
            lines.append(f'<path data-order="{i}" d="{_path_d(scene.strokes[i])}"/>')
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
