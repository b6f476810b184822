"""Render ground truth and a prediction as colour-coded SVGs.

Every group gets one palette colour, so over- and under-segmentation show up
as colour changes inside one object or shared colour across two.

    python demos/06_render.py [OUT_DIR]
"""

import sys
from pathlib import Path

from strokeseg.composer import ComposerConfig, compose_scene
from strokeseg.detect import JitterConfig, jittered_oracle
from strokeseg.doodles import doodle_pool
from strokeseg.postproc import segment
from strokeseg.raster import render_svg
from strokeseg.sketch_io import save_segmentation

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(parents=True, exist_ok=True)

scene = compose_scene(doodle_pool(seed=0), ComposerConfig(seed=6), scene_id="demo")
pred = segment(scene, jittered_oracle(scene, JitterConfig(sigma=25, seed=1)))

(out / "demo_gt.svg").write_text(render_svg(scene, scene.gt_instances))
(out / "demo_pred.svg").write_text(render_svg(scene, pred.groups))
save_segmentation(pred, out / "demo_pred.json")
print(f"ground truth: {len(scene.gt_instances)} groups, prediction: {len(pred.groups)} groups")
print("wrote", *(out / n for n in ("demo_gt.svg", "demo_pred.svg", "demo_pred.json")))
