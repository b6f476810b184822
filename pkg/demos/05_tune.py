"""Grid-search the post-processor thresholds on two validation sets.

A small grid keeps this quick; ``GridSpec()`` with no arguments is the full
1540-configuration sweep.

    python demos/05_tune.py
"""

import logging

from strokeseg.composer import ComposerConfig, compose_many
from strokeseg.detect import JitterConfig, jittered_oracle
from strokeseg.doodles import doodle_pool
from strokeseg.tune import GridSpec, grid_search

logging.disable(logging.WARNING)
pool = doodle_pool(seed=0)
validation = {}
for name, sigma, seed in (("mild", 4.0, 10), ("noisy", 15.0, 11)):
    scenes = compose_many(pool, ComposerConfig(seed=seed, max_objects=5), 10)
    validation[name] = [(s, jittered_oracle(s, JitterConfig(sigma=sigma, seed=k))) for k, s in enumerate(scenes)]

grid = GridSpec(
    iou_thresholds=(0.25, 0.45, 0.65, 0.85),
    or_thresholds=(0.3, 0.6, 0.8),
    num_repeats_options=(1, 3),
    thickness_options=(2,),
)
report = grid_search(validation, grid)
print(f"{grid.size} configurations; top 5:")
for row in report.rows[:5]:
    c = row.config
    print(
        f"  iou>{c.iou_threshold:.2f} or>{c.or_threshold:.2f} x{c.num_repeats}: "
        f"mean {row.average:.3f}  "
        + "  ".join(f"{n}: AoN {row.aon[n]:.3f} S-IoU {row.s_iou[n]:.3f}" for n in validation)
    )
print("best:", report.best.as_dict())
