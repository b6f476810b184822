import pytest

from conftest import make_scene
from strokeseg.detect import JitterConfig, cluster_boxes, jittered_oracle, oracle_boxes
from strokeseg.geometry import AABB

PTS = [
    [(10, 10), (30, 10)],
    [(10, 30), (30, 30)],
    [(60, 60), (80, 70)],
    [(70, 60), (70, 90)],
]


def two_objects():
    return make_scene(PTS, groups=[[0, 1], [2, 3]])


def test_oracle_boxes_are_tight():
    assert oracle_boxes(two_objects()).boxes == [AABB(10, 10, 30, 30), AABB(60, 60, 80, 90)]
    with pytest.raises(ValueError):
        oracle_boxes(make_scene(PTS))


def test_jitter_zero_sigma_is_oracle(scenes):
    for s in scenes[:4]:
        assert jittered_oracle(s, JitterConfig(seed=3)).boxes == oracle_boxes(s).boxes


def test_jitter_reproducible_and_clipped(scenes):
    s = scenes[0]
    cfg = JitterConfig(sigma=40.0, seed=11)
    a, b = jittered_oracle(s, cfg), jittered_oracle(s, cfg)
    assert a == b
    assert a != jittered_oracle(s, JitterConfig(sigma=40.0, seed=12))
    for box in a.boxes:
        assert 0 <= box.x_min <= box.x_max <= s.canvas_w
        assert 0 <= box.y_min <= box.y_max <= s.canvas_h


def test_jitter_drop_and_merge():
    s = two_objects()
    assert len(jittered_oracle(s, JitterConfig(drop_prob=1.0))) == 0
    merged = jittered_oracle(s, JitterConfig(merge_prob=1.0))
    assert merged.boxes == [AABB(10, 10, 80, 90)]
    with pytest.raises(ValueError):
        JitterConfig(sigma=-1)
    with pytest.raises(ValueError):
        JitterConfig(drop_prob=2)


def test_cluster_boxes():
    s = two_objects()
    assert cluster_boxes(s, 25).boxes == [AABB(10, 10, 30, 30), AABB(60, 60, 80, 90)]
    assert cluster_boxes(s, float("inf")).boxes == [AABB(10, 10, 80, 90)]
    # gap 0 still links touching or overlapping boxes
    assert len(cluster_boxes(s, 0)) == 3
    assert len(cluster_boxes(make_scene([]), 5)) == 0
