"""Stroke-level instance segmentation of vector scene sketches.

Detector boxes in, stroke groups out, plus synthetic scene generation,
temporal rasterization and the evaluation metrics around that step.
"""

__version__ = "0.1.0"

from .geometry import (
    AABB,
    EmptyStrokeSetError,
    PartitionError,
    PipelineConfig,
    Point,
    Scene,
    Stroke,
    StrokeGroup,
    bbox_of_strokes,
    box_distance,
    iou,
    overlap_ratio,
)
from .sketch_io import (
    Detection,
    DetectionSet,
    SegmentationResult,
    SingleSketch,
    SketchParseError,
    export_coco_annotations,
    load_boxes,
    load_scene,
    load_segmentation,
    parse_quickdraw_ndjson,
    save_boxes,
    save_scene,
    save_segmentation,
)
from .raster import RGB, RasterImage, rasterize_scene, render_svg, temporal_color
from .composer import ComposerConfig, DegenerateSketchError, compose_dataset, compose_scene, normalize_object
from .postproc import best_sequence_for_box, maximal_runs, segment, segment_batch
from .metrics import PixelMetricReport, aon, evaluate, oracle_classify, pixel_metrics, s_iou
from .detect import JitterConfig, cluster_boxes, jittered_oracle, oracle_boxes
from .tune import GridSpec, TuneReport, grid_search
