"""Moving-object detection in dynamic backgrounds.

Frames are numpy uint8 arrays shaped (height, width); sequences are
(frames, height, width). Pixel matrices are float64 (pixels, frames).
"""

from dynabg._core import (
    ConfusionCounts,
    Decomposition,
    GroupPartition,
    MetricReport,
    PartitionStats,
    __version__,
    binarize,
    compare,
    conditional_prob,
    detect,
    evaluate_sequence,
    generalized_l21_norm,
    group_shrink,
    l1_shrink,
    load_sequence,
    metrics,
    pool_frame,
    pool_sequence,
    save_frame,
    solve_rpca,
    solve_sc_rpca,
    stable_value,
    stack,
    svd_economy,
    svt,
    synth_scene,
    to_grayscale,
    unstack,
    video_segmentation,
)

__all__ = [
    "ConfusionCounts",
    "Decomposition",
    "GroupPartition",
    "MetricReport",
    "PartitionStats",
    "__version__",
    "binarize",
    "compare",
    "conditional_prob",
    "detect",
    "evaluate_sequence",
    "generalized_l21_norm",
    "group_shrink",
    "l1_shrink",
    "load_sequence",
    "metrics",
    "pool_frame",
    "pool_sequence",
    "save_frame",
    "solve_rpca",
    "solve_sc_rpca",
    "stable_value",
    "stack",
    "svd_economy",
    "svt",
    "synth_scene",
    "to_grayscale",
    "unstack",
    "video_segmentation",
]
