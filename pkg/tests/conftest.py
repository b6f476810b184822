import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from strokeseg.composer import ComposerConfig, compose_many  # noqa: E402
from strokeseg.doodles import doodle_pool  # noqa: E402
from strokeseg.geometry import Scene, Stroke, StrokeGroup  # noqa: E402


@pytest.fixture(scope="session")
def pool():
    return doodle_pool(per_class=3, seed=0)


@pytest.fixture(scope="session")
def scenes(pool):
    return compose_many(pool, ComposerConfig(seed=5), 12)


def make_scene(stroke_points, groups=None, labels=None, canvas=(100, 100)):
    """Scene from a list of point lists; ``groups`` lists stroke index lists."""
    strokes = tuple(Stroke(tuple(pts), k) for k, pts in enumerate(stroke_points))
    gt = None
    if groups is not None:
        labels = labels or [f"c{k}" for k in range(len(groups))]
        gt = tuple(StrokeGroup.from_strokes(g, strokes, lab) for g, lab in zip(groups, labels))
    return Scene(canvas[0], canvas[1], strokes, gt, scene_id="t")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
