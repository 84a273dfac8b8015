"""maizekpr: kernels-per-row phenotyping for maize ear images.

The engine consumes per-kernel segmentation masks (through a simple JSON
"mask contract" format), validates and filters them into kernels, builds
an angle-refined nearest-neighbour graph over the kernel centers, traces
rows as cheapest paths, and reports a three-path averaged kernels-per-row
value per ear. A synthetic-ear generator with construction-known truth
serves as the test oracle, and a small evaluation harness reproduces the
accuracy metrics used to score the approach.
"""

from .contract import ContractDoc, load_contract, write_contract
from .core import (
    EarRecord,
    GroundTruthAnnotation,
    Kernel,
    MaskCandidate,
    center_of_bbox,
    mask_stats,
    validate_candidate,
)
from .errors import EngineError
from .evaluation import EvalPair, accuracy_ratio, compare_paths, histogram, r_squared
from .extract import ExtractConfig, connected_components, extract_ears, rgb_to_hsv, threshold_value
from .filtering import FilterConfig, filter_masks, iou
from .multipath import KprResult, central_polyline, polyline_x_at, split_kernels, three_path_kpr
from .rle import rle_decode, rle_encode
from .rowgraph import (
    EarGraph,
    GraphConfig,
    RowPath,
    build_adjacency,
    count_kpr_single,
    dijkstra,
    filter_immature,
    knn_neighbors,
    refine_by_angle,
    select_endpoints,
)
from .synth import SyntheticEarSpec, generate_ear, generate_scene

__version__ = "0.1.0"

__all__ = [
    "ContractDoc",
    "EarGraph",
    "EarRecord",
    "EngineError",
    "EvalPair",
    "ExtractConfig",
    "FilterConfig",
    "GraphConfig",
    "GroundTruthAnnotation",
    "Kernel",
    "KprResult",
    "MaskCandidate",
    "RowPath",
    "SyntheticEarSpec",
    "accuracy_ratio",
    "build_adjacency",
    "center_of_bbox",
    "central_polyline",
    "compare_paths",
    "connected_components",
    "count_kpr_single",
    "dijkstra",
    "extract_ears",
    "filter_immature",
    "filter_masks",
    "generate_ear",
    "generate_scene",
    "histogram",
    "iou",
    "knn_neighbors",
    "load_contract",
    "mask_stats",
    "polyline_x_at",
    "r_squared",
    "refine_by_angle",
    "rgb_to_hsv",
    "rle_decode",
    "rle_encode",
    "select_endpoints",
    "split_kernels",
    "three_path_kpr",
    "threshold_value",
    "validate_candidate",
    "write_contract",
]
