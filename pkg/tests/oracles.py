"""Slow, obviously-correct reference implementations used only by the tests.

None of these share code paths with the vectorized or indexed versions they
check, apart from the scalar box algebra in ``strokeseg.geometry``.
"""

from __future__ import annotations

from fractions import Fraction

from strokeseg.geometry import bbox_of_strokes, iou


def best_sequence_brute(box, strokes, assigned):
    """Enumerate every contiguous all-unassigned range; pick by (iou, length, -start)."""
    n = len(strokes)
    best = None
    for i in range(n):
        for j in range(i, n):
            if any(assigned[i : j + 1]):
                break
            v = iou(bbox_of_strokes(strokes[i : j + 1]), box)
            key = (v, j - i + 1, -i)
            if best is None or key > best[0]:
                best = (key, range(i, j + 1))
    if best is None:
        return None, 0.0
    return best[1], best[0][0]


def s_iou_brute(gt, pred):
    """Mean over gt of the best |g & p| / |g | p| against every pred group."""
    gt = [set(g) for g in gt]
    pred = [set(p) for p in pred]
    total = Fraction(0)
    for g in gt:
        total += max(Fraction(len(g & p), len(g | p)) for p in pred)
    return total / len(gt)


def aon_brute(gt, pred):
    hits = sum(1 for g in gt if any(set(g) == set(p) for p in pred))
    return Fraction(hits, len(gt))


def pixel_metrics_brute(gt, pred):
    """Per-pixel counting over gt foreground; returns the four metrics as Fractions."""
    h, w = len(gt), len(gt[0])
    tp, gt_n, pred_n = {}, {}, {}
    total = 0
    for y in range(h):
        for x in range(w):
            g = int(gt[y][x])
            if g == 0:
                continue
            p = int(pred[y][x])
            total += 1
            gt_n[g] = gt_n.get(g, 0) + 1
            pred_n[p] = pred_n.get(p, 0) + 1
            if g == p:
                tp[g] = tp.get(g, 0) + 1
    classes = sorted(set(gt_n) | set(pred_n))
    ious = {c: Fraction(tp.get(c, 0), gt_n.get(c, 0) + pred_n.get(c, 0) - tp.get(c, 0)) for c in classes}
    recalls = [Fraction(tp.get(c, 0), gt_n[c]) for c in gt_n]
    return {
        "ov_acc": Fraction(sum(tp.values()), total),
        "mean_acc": sum(recalls) / len(recalls),
        "m_iou": sum(ious.values()) / len(ious),
        "fw_iou": sum(Fraction(gt_n[c], total) * ious[c] for c in gt_n),
    }


def square_dilated_pixels(core, thickness, width, height):
    """Set of (x, y) pixels covered by a thickness x thickness square at each core pixel."""
    lo = -(thickness // 2)
    out = set()
    for x, y in core:
        for dx in range(lo, lo + thickness):
            for dy in range(lo, lo + thickness):
                if 0 <= x + dx < width and 0 <= y + dy < height:
                    out.add((x + dx, y + dy))
    return out
