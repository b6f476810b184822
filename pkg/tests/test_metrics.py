from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import make_scene
from oracles import aon_brute, pixel_metrics_brute, s_iou_brute
from strokeseg.composer import ComposerConfig, compose_many
from strokeseg.detect import oracle_boxes
from strokeseg.geometry import AABB, PartitionError, StrokeGroup
from strokeseg.metrics import aon, evaluate, mean_report, oracle_classify, pixel_metrics, s_iou
from strokeseg.postproc import segment

GT = [[0, 1], [2, 3]]


def test_aon_examples():
    assert aon(GT, GT) == 1.0
    assert aon(GT, [[0, 1, 2], [3]]) == 0.0
    assert aon(GT, [[0, 1], [2], [3]]) == 0.5


def test_s_iou_examples():
    assert s_iou(GT, GT) == 1.0
    # brute force: (2/3 + 1/2) / 2
    assert s_iou_brute(GT, [[0, 1, 2], [3]]) == Fraction(7, 12)
    assert s_iou(GT, [[0, 1, 2], [3]]) == pytest.approx(7 / 12, abs=1e-12)
    assert s_iou([[0, 1, 2, 3]], [[0, 1], [2, 3]]) == 0.5


def test_metrics_reject_non_partitions():
    with pytest.raises(PartitionError):
        aon(GT, [[0, 1], [1, 2, 3]])
    with pytest.raises(PartitionError):
        s_iou(GT, [[0, 1]])


def random_partition(draw, n):
    k = draw(st.integers(1, min(8, n)))
    labels = draw(st.lists(st.integers(0, k - 1), min_size=n, max_size=n))
    groups = {}
    for i, lab in enumerate(labels):
        groups.setdefault(lab, []).append(i)
    return list(groups.values())


@st.composite
def partition_pairs(draw):
    n = draw(st.integers(1, 40))
    return random_partition(draw, n), random_partition(draw, n)


@settings(max_examples=400, deadline=None)
@given(partition_pairs())
def test_stroke_metrics_match_brute_force(pair):
    gt, pred = pair
    assert s_iou(gt, pred) == float(s_iou_brute(gt, pred))
    assert aon(gt, pred) == float(aon_brute(gt, pred))
    assert 0.0 <= aon(gt, pred) <= s_iou(gt, pred) <= 1.0


@settings(max_examples=100, deadline=None)
@given(partition_pairs(), st.randoms(use_true_random=False))
def test_stroke_metrics_ignore_pred_order(pair, rnd):
    gt, pred = pair
    shuffled = [list(g) for g in pred]
    rnd.shuffle(shuffled)
    for g in shuffled:
        rnd.shuffle(g)
    assert aon(gt, pred) == aon(gt, shuffled)
    assert s_iou(gt, pred) == s_iou(gt, shuffled)


def two_class_fixture():
    gt = np.zeros((10, 12), dtype=np.int32)
    pred = np.zeros_like(gt)
    gt[0:6, 0:10] = 1  # 60 pixels of class 1
    gt[6:10, 0:10] = 2  # 40 pixels of class 2
    pred[gt > 0] = 1  # class 2 predicted as class 1 everywhere
    pred[:, 10:] = 2  # background predictions are ignored
    return gt, pred


def test_pixel_fixture():
    gt, pred = two_class_fixture()
    brute = pixel_metrics_brute(gt.tolist(), pred.tolist())
    assert brute == {
        "ov_acc": Fraction(3, 5),
        "mean_acc": Fraction(1, 2),
        "m_iou": Fraction(3, 10),
        "fw_iou": Fraction(9, 25),
    }
    rep = pixel_metrics(gt, pred)
    assert rep.ov_acc == pytest.approx(0.60, abs=1e-12)
    assert rep.mean_acc == pytest.approx(0.50, abs=1e-12)
    assert rep.m_iou == pytest.approx(0.30, abs=1e-12)
    assert rep.fw_iou == pytest.approx(0.36, abs=1e-12)
    assert rep.per_class[1] == (0.6, 1.0, 60)
    assert rep.per_class[2] == (0.0, 0.0, 40)


def test_pixel_identity_and_errors():
    gt, _ = two_class_fixture()
    rep = pixel_metrics(gt, gt)
    assert (rep.ov_acc, rep.mean_acc, rep.m_iou, rep.fw_iou) == (1.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError, match="no foreground"):
        pixel_metrics(np.zeros((3, 3)), np.zeros((3, 3)))
    with pytest.raises(ValueError):
        pixel_metrics(np.zeros((3, 3)), np.zeros((3, 4)))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pixel_metrics_match_brute_force(seed):
    rng = np.random.default_rng(seed)
    gt = rng.integers(0, 4, size=(7, 9))
    if not gt.any():
        gt[0, 0] = 1
    pred = rng.integers(0, 5, size=gt.shape)
    rep = pixel_metrics(gt, pred)
    brute = pixel_metrics_brute(gt.tolist(), pred.tolist())
    for k, v in brute.items():
        assert getattr(rep, k) == pytest.approx(float(v), abs=1e-12)
    # relabelling classes keeps overall accuracy
    perm = np.array([0, 3, 1, 4, 2, 5])
    rep2 = pixel_metrics(perm[gt], perm[pred])
    assert rep2.ov_acc == rep.ov_acc
    assert rep2.per_class[perm[1]] == rep.per_class[1]


def test_oracle_classify():
    s = make_scene([[(0, 0)], [(1, 1)], [(2, 2)], [(3, 3)]], groups=[[0, 1], [2, 3]], labels=["cat", "dog"])
    gt = s.gt_instances
    assert [g.class_label for g in oracle_classify(gt, gt)] == ["cat", "dog"]
    pred = [StrokeGroup.from_strokes([0, 1, 2], s.strokes), StrokeGroup.from_strokes([3], s.strokes)]
    assert [g.class_label for g in oracle_classify(pred, gt)] == ["cat", "dog"]
    tie = [StrokeGroup.from_strokes([1, 2], s.strokes), StrokeGroup.from_strokes([0, 3], s.strokes)]
    assert [g.class_label for g in oracle_classify(tie, gt)] == ["cat", "cat"]
    unlabeled = [StrokeGroup(frozenset({0}), AABB(0, 0, 0, 0))]
    with pytest.raises(ValueError):
        oracle_classify(pred, unlabeled)


def test_evaluate_perfect_and_split():
    s = make_scene(
        [[(10, 10), (30, 10)], [(10, 30), (30, 30)], [(60, 60), (80, 70)], [(70, 60), (70, 90)]],
        groups=[[0, 1], [2, 3]],
        labels=["cat", "dog"],
    )
    rep = evaluate(s, s.gt_instances)
    assert all(rep[k] == 1.0 for k in ("aon", "s_iou", "ov_acc", "mean_acc", "m_iou", "fw_iou"))

    split = [StrokeGroup.from_strokes(g, s.strokes) for g in ([0, 1], [2], [3])]
    rep = evaluate(s, split)
    assert rep["aon"] == 0.5 < 1
    assert rep["s_iou"] == pytest.approx(float(s_iou_brute([[0, 1], [2, 3]], [[0, 1], [2], [3]])), abs=1e-12)
    # both halves keep the dog label, so pixels stay perfect
    assert rep["ov_acc"] == 1.0


def test_evaluate_oracle_recovery_end_to_end(pool):
    for s in compose_many(pool, ComposerConfig(seed=8, max_pair_iou=0.0), 5):
        rep = evaluate(s, segment(s, oracle_boxes(s)))
        assert all(rep[k] == 1.0 for k in ("aon", "s_iou", "ov_acc", "mean_acc", "m_iou", "fw_iou"))


def test_mean_report():
    rows = [dict.fromkeys(("aon", "s_iou", "ov_acc", "mean_acc", "m_iou", "fw_iou"), v) for v in (0.2, 0.4)]
    assert mean_report(rows)["aon"] == pytest.approx(0.3)
