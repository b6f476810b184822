import colorsys
import io
import re

import numpy as np
import pytest
from hypothesis import given, strategies as st
from PIL import Image

from conftest import make_scene
from oracles import square_dilated_pixels
from strokeseg.geometry import StrokeGroup
from strokeseg.raster import PALETTE, bresenham, rasterize_scene, render_svg, temporal_color, temporal_hue


def test_temporal_color_endpoints():
    for n in (1, 2, 5, 36):
        assert temporal_color(0, n) == (0, 0, 255)
    for n in (2, 5, 36):
        assert temporal_color(n - 1, n) == (255, 0, 0)


def test_temporal_color_midpoint_is_green():
    # hue 240 * (1 - 1/2) = 120 degrees
    assert temporal_hue(1, 3) == 120.0
    assert temporal_color(1, 3) == (0, 255, 0)


def test_temporal_color_matches_hsv_formula():
    for n in (4, 7):
        for i in range(n):
            h = 240 * (1 - i / (n - 1)) / 360
            want = tuple(int(round(c * 255 + 1e-9)) for c in colorsys.hsv_to_rgb(h, 1, 1))
            assert temporal_color(i, n) == want


def test_temporal_color_range_errors():
    with pytest.raises(ValueError):
        temporal_color(3, 3)
    with pytest.raises(ValueError):
        temporal_color(-1, 3)


@given(st.integers(min_value=2, max_value=200))
def test_hue_strictly_decreasing_with_even_gaps(n):
    hues = [temporal_hue(i, n) for i in range(n)]
    gaps = np.diff(hues)
    assert (gaps < 0).all()
    assert np.allclose(gaps, -240 / (n - 1))


@given(st.integers(-20, 20), st.integers(-20, 20), st.integers(-20, 20), st.integers(-20, 20))
def test_bresenham_properties(x0, y0, x1, y1):
    pts = bresenham(x0, y0, x1, y1)
    assert pts[0] == (x0, y0) and pts[-1] == (x1, y1)
    assert len(pts) == max(abs(x1 - x0), abs(y1 - y0)) + 1
    for (a, b), (c, d) in zip(pts, pts[1:]):
        assert max(abs(a - c), abs(b - d)) == 1


def test_horizontal_stroke_thickness_one():
    s = make_scene([[(0, 5), (4, 5)]], canvas=(20, 20))
    img = rasterize_scene(s, 1, "binary")
    assert int(img.pixels.sum()) == 5
    assert set(zip(*np.nonzero(img.pixels.T))) == {(x, 5) for x in range(5)}


def test_horizontal_stroke_thickness_two():
    s = make_scene([[(0, 5), (4, 5)]], canvas=(20, 20))
    img = rasterize_scene(s, 2, "binary")
    want = square_dilated_pixels([(x, 5) for x in range(5)], 2, 20, 20)
    assert len(want) == 10
    assert set(zip(*np.nonzero(img.pixels.T))) == want
    # a two-pixel-tall band
    assert set(np.nonzero(img.pixels)[0]) == {4, 5}


@pytest.mark.parametrize("t", [1, 2, 3, 4])
def test_dilation_matches_oracle_on_diagonal(t):
    s = make_scene([[(3.4, 2.5), (12.6, 9.49)]], canvas=(16, 12))
    core = bresenham(3, 3, 13, 9)
    img = rasterize_scene(s, t, "binary")
    assert set(zip(*np.nonzero(img.pixels.T))) == square_dilated_pixels(core, t, 16, 12)


def test_colored_painting_order():
    s = make_scene([[(0, 0), (9, 0)], [(5, 0), (5, 9)]], canvas=(10, 10))
    img = rasterize_scene(s, 1, "colored")
    assert tuple(img.pixels[0, 0]) == (0, 0, 255)
    assert tuple(img.pixels[9, 5]) == (255, 0, 0)
    # the later stroke wins at the crossing
    assert tuple(img.pixels[0, 5]) == (255, 0, 0)
    assert tuple(img.pixels[5, 0]) == (255, 255, 255)


def test_labels_mode():
    s = make_scene([[(0, 0), (3, 0)], [(0, 5), (3, 5)]], canvas=(10, 10))
    img = rasterize_scene(s, 1, "labels", [7, 9])
    assert set(np.unique(img.pixels)) == {0, 7, 9}
    with pytest.raises(ValueError):
        rasterize_scene(s, 1, "labels", [1])


def test_thickness_must_be_positive():
    s = make_scene([[(0, 0)]])
    with pytest.raises(ValueError):
        rasterize_scene(s, 0)


def test_rasterization_deterministic_and_png(scenes):
    a = rasterize_scene(scenes[0], 2).to_png()
    b = rasterize_scene(scenes[0], 2).to_png()
    assert a == b
    im = Image.open(io.BytesIO(a))
    assert im.mode == "RGB" and im.size == (scenes[0].canvas_w, scenes[0].canvas_h)


def test_binary_ink_independent_of_order(scenes):
    s = scenes[1]
    img = rasterize_scene(s, 2, "binary").pixels
    union = np.zeros_like(img)
    for k in range(s.num_strokes):
        one = make_scene([s.strokes[k].points], canvas=(s.canvas_w, s.canvas_h))
        union |= rasterize_scene(one, 2, "binary").pixels
    assert np.array_equal(img, union)


def test_svg_one_group():
    s = make_scene([[(0, 0), (5, 5)], [(1, 1)]])
    svg = render_svg(s, [StrokeGroup.from_strokes([0, 1], s.strokes)])
    assert svg.count("<path") == 2
    assert svg.count("<g ") == 1
    assert f'stroke="{PALETTE[0]}"' in svg


def test_svg_two_groups_and_determinism():
    s = make_scene([[(0, 0), (5, 5)], [(1, 1), (2, 2)], [(3, 3)]])
    groups = [StrokeGroup.from_strokes([0, 2], s.strokes), StrokeGroup.from_strokes([1], s.strokes)]
    svg = render_svg(s, groups)
    assert re.findall(r'stroke="(#[0-9a-f]{6})"', svg) == [PALETTE[0], PALETTE[1]]
    assert svg == render_svg(s, groups)


def test_svg_empty_scene_and_bad_partition():
    s = make_scene([], canvas=(30, 20))
    svg = render_svg(s, [])
    assert 'width="30" height="20"' in svg and "<path" not in svg
    s2 = make_scene([[(0, 0)], [(1, 1)]])
    with pytest.raises(ValueError):
        render_svg(s2, [StrokeGroup.from_strokes([0], s2.strokes)])
