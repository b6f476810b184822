"""Generate a handful of synthetic scene sketches.

Single-object doodles are scaled, placed on a portrait or landscape canvas
with limited box overlap, and concatenated into one stroke sequence. Each
scene is written as JSON next to a COCO file of its instance boxes.

    python demos/01_compose_scenes.py [OUT_DIR]
"""

import sys
from pathlib import Path

from strokeseg.composer import ComposerConfig, compose_dataset
from strokeseg.doodles import doodle_pool

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out") / "corpus"

pool = doodle_pool(per_class=3, seed=0)
print(f"pool: {len(pool)} doodles of {len({s.class_label for s in pool})} classes")

cfg = ComposerConfig(seed=1, max_objects=5)
manifest = compose_dataset(pool, cfg, 6, out, write_png=True)

for sid in manifest.splits["all"]:
    print(sid, "->", out / "scenes" / f"{sid}.json")
print("COCO boxes:", out / "annotations.json")
