"""Group strokes into objects from detector boxes.

Three box sources are compared on the same scene: perfect boxes, boxes with
Gaussian edge noise, and a detector-free baseline that clusters nearby
strokes.

    python demos/03_segment.py
"""

from strokeseg.composer import ComposerConfig, compose_scene
from strokeseg.detect import JitterConfig, cluster_boxes, jittered_oracle, oracle_boxes
from strokeseg.doodles import doodle_pool
from strokeseg.geometry import PipelineConfig
from strokeseg.metrics import aon, s_iou
from strokeseg.postproc import segment

scene = compose_scene(doodle_pool(seed=0), ComposerConfig(seed=3), scene_id="demo")
gt = scene.gt_instances
print(f"{scene.num_strokes} strokes, {len(gt)} objects:", [g.class_label for g in gt])

sources = {
    "oracle": oracle_boxes(scene),
    "jitter 10px": jittered_oracle(scene, JitterConfig(sigma=10, seed=0)),
    "cluster 15px": cluster_boxes(scene, 15),
}
cfg = PipelineConfig()  # 0.65 IoU, 0.60 overlap, 3 passes
for name, dets in sources.items():
    res = segment(scene, dets, cfg)
    print(
        f"{name:>13}: {len(dets)} boxes -> {len(res.groups)} groups "
        f"in {res.iterations} pass(es); AoN {aon(gt, res.groups):.2f}, S-IoU {s_iou(gt, res.groups):.2f}"
    )

res = segment(scene, sources["oracle"], cfg)
for g in res.groups:
    idx = g.sorted_indices()
    print(f"  strokes {idx[0]}-{idx[-1]} in box {tuple(round(v) for v in g.box.as_tuple())}")
