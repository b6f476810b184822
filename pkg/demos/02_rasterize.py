"""Rasterize a scene with temporal colouring.

The first stroke is blue, the last is red, and hue sweeps evenly in between,
so drawing order is visible in the picture. A binary ink mask is written too.

    python demos/02_rasterize.py [OUT_DIR]
"""

import sys
from pathlib import Path

from strokeseg.composer import ComposerConfig, compose_scene
from strokeseg.doodles import doodle_pool
from strokeseg.raster import rasterize_scene, temporal_color

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(parents=True, exist_ok=True)

scene = compose_scene(doodle_pool(seed=0), ComposerConfig(seed=2), scene_id="demo")
n = scene.num_strokes
print(f"{n} strokes on a {scene.canvas_w}x{scene.canvas_h} canvas")
for i in (0, n // 2, n - 1):
    print(f"  stroke {i:>3} colour {temporal_color(i, n)}")

for thickness in (1, 4):
    path = out / f"demo_colored_t{thickness}.png"
    path.write_bytes(rasterize_scene(scene, thickness).to_png())
    print("wrote", path)

mask = rasterize_scene(scene, 2, mode="binary")
print(f"ink pixels at thickness 2: {int(mask.pixels.sum())}")
