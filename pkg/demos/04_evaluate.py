"""Score predictions with stroke-level and pixel-level metrics.

AoN counts objects recovered exactly; S-IoU gives partial credit by set IoU.
Pixel metrics label each predicted group by its majority ground-truth class
and compare label rasters over the ink.

    python demos/04_evaluate.py
"""

import logging

from strokeseg.composer import ComposerConfig, compose_many
from strokeseg.detect import JitterConfig, jittered_oracle
from strokeseg.doodles import doodle_pool
from strokeseg.metrics import METRIC_KEYS, evaluate, mean_report
from strokeseg.postproc import segment

logging.disable(logging.WARNING)
scenes = compose_many(doodle_pool(seed=0), ComposerConfig(seed=4), 40)

print("sigma  " + "  ".join(f"{k:>8}" for k in METRIC_KEYS))
for sigma in (0, 5, 20):
    rows = [
        evaluate(s, segment(s, jittered_oracle(s, JitterConfig(sigma=sigma, seed=k))))
        for k, s in enumerate(scenes)
    ]
    mean = mean_report(rows)
    print(f"{sigma:>5}  " + "  ".join(f"{mean[k]:8.3f}" for k in METRIC_KEYS))
