"""Procedural single-object doodles in QuickDraw's 0..255 coordinate frame.

These stand in for a QuickDraw pool when none is on disk. Each class draws a
fixed stroke layout with small random wobble, so sketches of one class vary
the way hand drawings do without changing their stroke count much.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import Stroke
from .sketch_io import SingleSketch

_FRAME = 255.0


def _wobble(rng, pts, amount=3.0):
    pts = np.asarray(pts, dtype=float)
    return pts + rng.normal(0.0, amount, size=pts.shape)


def _arc(cx, cy, rx, ry, a0, a1, n=16):
    t = np.linspace(math.radians(a0), math.radians(a1), n)
    return np.stack([cx + rx * np.cos(t), cy + ry * np.sin(t)], axis=1)


def _line(x0, y0, x1, y1, n=2):
    return np.stack([np.linspace(x0, x1, n), np.linspace(y0, y1, n)], axis=1)


def _sun(rng):
    r = rng.uniform(40, 60)
    parts = [_arc(128, 128, r, r, 0, 360, 20)]
    rays = int(rng.integers(8, 13))
    for k in range(rays):
        a = 2 * math.pi * k / rays
        parts.append(_line(128 + (r + 10) * math.cos(a), 128 + (r + 10) * math.sin(a),
                           128 + (r + 50) * math.cos(a), 128 + (r + 50) * math.sin(a)))
    return parts


def _house(rng):
    parts = [
        _line(40, 120, 40, 240), _line(40, 240, 215, 240), _line(215, 240, 215, 120), _line(215, 120, 40, 120),
        np.array([[30, 125], [128, 30], [225, 125]], float),
        _line(105, 240, 105, 180, 2), _line(105, 180, 150, 180), _line(150, 180, 150, 240),
    ]
    for wx in (60, 165):
        parts.append(np.array([[wx, 140], [wx + 30, 140], [wx + 30, 165], [wx, 165], [wx, 140]], float))
        parts.append(_line(wx + 15, 140, wx + 15, 165))
    if rng.random() < 0.7:
        parts.append(np.array([[170, 80], [170, 45], [195, 45], [195, 100]], float))
    return parts


def _flower(rng):
    petals = int(rng.integers(5, 9))
    parts = [_arc(128, 90, 18, 18, 0, 360, 12)]
    for k in range(petals):
        a = 360 * k / petals
        cx = 128 + 38 * math.cos(math.radians(a))
        cy = 90 + 38 * math.sin(math.radians(a))
        parts.append(_arc(cx, cy, 18, 18, 0, 360, 10))
    parts.append(_line(128, 110, 128, 250, 6))
    parts.append(np.array([[128, 190], [160, 165], [180, 175], [128, 200]], float))
    parts.append(np.array([[128, 215], [95, 190], [75, 200], [128, 225]], float))
    return parts


def _face(rng):
    parts = [
        _arc(128, 128, 110, 120, 0, 360, 24),
        _arc(88, 100, 14, 9, 0, 360, 8),
        _arc(168, 100, 14, 9, 0, 360, 8),
        _arc(88, 100, 3, 3, 0, 360, 5),
        _arc(168, 100, 3, 3, 0, 360, 5),
        _line(128, 110, 120, 150, 3),
        _arc(128, 165, 40, 25, 20, 160, 10),
        _line(70, 75, 105, 70),
        _line(150, 70, 185, 75),
    ]
    for k in range(int(rng.integers(2, 6))):
        x = 60 + 35 * k
        parts.append(_line(x, 15, x + 10, -5 + rng.uniform(0, 10)))
    return parts


def _car(rng):
    return [
        np.array([[10, 170], [10, 130], [60, 125], [90, 80], [170, 80], [200, 125], [245, 135], [245, 170]], float),
        _line(10, 170, 45, 170), _line(95, 170, 160, 170), _line(210, 170, 245, 170),
        _arc(70, 175, 25, 25, 0, 360, 14), _arc(70, 175, 8, 8, 0, 360, 6),
        _arc(185, 175, 25, 25, 0, 360, 14), _arc(185, 175, 8, 8, 0, 360, 6),
        np.array([[100, 90], [130, 90], [130, 122], [75, 122], [100, 90]], float),
        np.array([[140, 90], [165, 90], [188, 122], [140, 122], [140, 90]], float),
        _line(120, 135, 135, 135),
    ]


def _tree(rng):
    parts = [_line(110, 250, 115, 160, 4), _line(145, 250, 140, 160, 4)]
    for k in range(int(rng.integers(4, 8))):
        a = 360 * k / 6.0
        parts.append(_arc(128 + 45 * math.cos(math.radians(a)), 100 + 35 * math.sin(math.radians(a)), 40, 35, a + 90, a + 270, 10))
    for _ in range(int(rng.integers(2, 5))):
        x, y = rng.uniform(90, 170), rng.uniform(70, 130)
        parts.append(_arc(x, y, 5, 5, 0, 360, 6))
    return parts


def _star(rng):
    pts = []
    for k in range(11):
        r = 120 if k % 2 == 0 else 50
        a = math.radians(-90 + 36 * k)
        pts.append([128 + r * math.cos(a), 128 + r * math.sin(a)])
    pts = np.asarray(pts)
    parts = [pts[i : i + 3] for i in range(0, 10, 2)]
    for _ in range(int(rng.integers(1, 4))):
        x, y = rng.uniform(20, 235), rng.uniform(20, 235)
        parts.append(_line(x - 8, y, x + 8, y))
        parts.append(_line(x, y - 8, x, y + 8))
    return parts


def _fish(rng):
    parts = [
        _arc(110, 128, 90, 50, -160, 160, 20),
        np.array([[195, 128], [245, 90], [245, 166], [195, 128]], float),
        _arc(60, 115, 7, 7, 0, 360, 6),
        _arc(115, 128, 20, 40, 250, 290, 4),
        _arc(140, 128, 20, 40, 250, 290, 4),
    ]
    for k in range(int(rng.integers(2, 6))):
        parts.append(_arc(20 - 6 * k, 60 - 18 * k, 6, 6, 0, 360, 6))
    return parts


GENERATORS = {
    "sun": _sun,
    "house": _house,
    "flower": _flower,
    "face": _face,
    "car": _car,
    "tree": _tree,
    "star": _star,
    "fish": _fish,
}


def draw(label: str, rng: np.random.Generator) -> SingleSketch:
    """One doodle of class ``label`` with hand-drawn wobble, clamped to 0..255."""
    parts = GENERATORS[label](rng)
    strokes = []
    for k, p in enumerate(parts):
        p = np.clip(_wobble(rng, p), 0.0, _FRAME)
        strokes.append(Stroke(tuple(map(tuple, np.round(p).tolist())), k))
    return SingleSketch(label, tuple(strokes))


def doodle_pool(per_class: int = 3, seed: int = 0, labels=None) -> list[SingleSketch]:
    """A deterministic pool with ``per_class`` sketches of each class."""
    rng = np.random.default_rng(seed)
    labels = list(GENERATORS) if labels is None else list(labels)
    return [draw(lab, rng) for lab in labels for _ in range(per_class)]
