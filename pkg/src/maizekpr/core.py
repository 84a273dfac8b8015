"""Domain types and mask bookkeeping shared by all pipeline stages.

Conventions used throughout the package:

* images are numpy arrays, ``(height, width, 3)`` uint8 for RGB rasters
  and ``(height, width)`` bool for binary masks;
* pixel coordinates are ``(x, y)`` with x growing rightwards and y growing
  downwards, so "bottom" means large y (ears are photographed tips-up);
* bounding boxes are ``(x, y, w, h)`` integer pixel tuples;
* kernel centers are real-valued (half-pixel resolution), never rounded,
  to avoid biasing the distance and angle computations downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DegenerateBoxError
from .rle import foreground_segments

DOT_LABELS = ("valid", "invalid", "expert_count")


def mask_stats(mask):
    """Foreground area and tight bounding box of a bool mask.

    Returns ``(area, (x, y, w, h))``; an empty mask yields ``(0, None)``,
    with ``None`` standing in for the empty-box sentinel.
    """
    arr = np.asarray(mask, dtype=bool)
    area = int(arr.sum())
    if area == 0:
        return 0, None
    cols = np.flatnonzero(arr.any(axis=0))
    rows = np.flatnonzero(arr.any(axis=1))
    x0, x1 = int(cols[0]), int(cols[-1])
    y0, y1 = int(rows[0]), int(rows[-1])
    return area, (x0, y0, x1 - x0 + 1, y1 - y0 + 1)


def center_of_bbox(bbox) -> tuple[float, float]:
    """Real-valued center ``(x + w/2, y + h/2)`` of an ``(x, y, w, h)`` box."""
    x, y, w, h = bbox
    if w <= 0 or h <= 0:
        raise DegenerateBoxError(f"bbox {bbox!r} has non-positive extent")
    return x + w / 2.0, y + h / 2.0


@dataclass(frozen=True)
class MaskCandidate:
    """One raw segmentation mask as produced by the mask backend.

    ``rle`` follows the column-major convention of :mod:`maizekpr.rle`.
    ``area`` and ``bbox`` are stored redundantly with the mask and are
    cross-checked at ingestion time; disagreement marks a backend bug and
    the candidate is rejected rather than silently corrected.
    """

    id: str
    rle: tuple[int, ...]
    width: int
    height: int
    bbox: tuple[int, int, int, int]
    area: int
    quality_score: float
    stability_score: float


@dataclass(frozen=True)
class Kernel:
    """A validated kernel: integer id, tight bbox, real center, pixel area."""

    id: int
    bbox: tuple[int, int, int, int]
    center: tuple[float, float]
    area: int


@dataclass
class EarRecord:
    """Provenance of one extracted ear crop within a scene image."""

    ear_id: str
    source_image: str
    crop_offset: tuple[int, int]
    metadata: dict[str, str] = field(default_factory=dict)


@dataclass
class GroundTruthAnnotation:
    """Expert annotation of one ear: a row polyline plus labelled dots.

    Dot labels: ``valid`` / ``invalid`` mark kernels on the machine path
    (counted / excluded by the expert), ``expert_count`` marks kernels the
    expert counted along their own chosen row.
    """

    ear_id: str
    expert_path: list[tuple[float, float]]
    dots: list[tuple[float, float, str]]

    def __post_init__(self):
        for x, y, label in self.dots:
            if label not in DOT_LABELS:
                raise ValueError(f"unknown dot label {label!r} at ({x}, {y})")

    def count_dots(self, label: str) -> int:
        if label not in DOT_LABELS:
            raise ValueError(f"unknown dot label {label!r}")
        return sum(1 for _, _, lab in self.dots if lab == label)


def candidate_geometry(cand: MaskCandidate):
    """Area and tight bbox recomputed from the candidate's own RLE.

    Works on the run segments directly so large frames are never
    materialised. Raises SumMismatchError on a malformed run list and
    ContractError when the mask has no foreground at all.
    """
    starts, ends = foreground_segments(cand.rle, cand.width, cand.height)
    if starts.size == 0:
        raise ContractError(f"candidate {cand.id!r} has an empty mask")
    h = cand.height
    area = int((ends - starts).sum())
    last = ends - 1
    col0 = starts // h
    col1 = last // h
    x0 = int(col0.min())
    x1 = int(col1.max())
    if bool(np.all(col0 == col1)):
        y0 = int((starts % h).min())
        y1 = int((last % h).max())
    else:
        # a run crossing a column boundary touches rows h-1 and 0
        y0, y1 = 0, h - 1
    return area, (x0, y0, x1 - x0 + 1, y1 - y0 + 1)


def validate_candidate(cand: MaskCandidate) -> None:
    """Check a candidate against the mask-contract invariants.

    Raises ContractError describing the first violation found. The checks
    are: dimensions positive, scores in [0, 1], RLE sums to the frame
    size, stored area equals the decoded foreground count, and the stored
    bbox is the tight bound of the decoded mask.
    """
    if cand.width < 1 or cand.height < 1:
        raise ContractError(f"candidate {cand.id!r}: bad dimensions {cand.width}x{cand.height}")
    for name, score in (("quality_score", cand.quality_score), ("stability_score", cand.stability_score)):
        if not (0.0 <= score <= 1.0):
            raise ContractError(f"candidate {cand.id!r}: {name}={score} outside [0, 1]")
    try:
        area, bbox = candidate_geometry(cand)
    except ContractError:
        raise
    except Exception as exc:
        raise ContractError(f"candidate {cand.id!r}: undecodable RLE ({exc})") from exc
    if area != cand.area:
        raise ContractError(
            f"candidate {cand.id!r}: stored area {cand.area} != decoded area {area}"
        )
    if tuple(bbox) != tuple(cand.bbox):
        raise ContractError(
            f"candidate {cand.id!r}: stored bbox {tuple(cand.bbox)} != decoded bbox {bbox}"
        )
    x, y, w, h = cand.bbox
    if x < 0 or y < 0 or x + w > cand.width or y + h > cand.height:
        raise ContractError(f"candidate {cand.id!r}: bbox {cand.bbox} exceeds the frame")


def decode_cropped(cand: MaskCandidate) -> np.ndarray:
    """Decode only the candidate's bbox window, as a ``(h, w)`` bool array.

    Cheap even on large frames; used for pairwise-IoU work where whole
    frames would be wasteful.
    """
    starts, ends = foreground_segments(cand.rle, cand.width, cand.height)
    x0, y0, bw, bh = cand.bbox
    out = np.zeros((bh, bw), dtype=bool)
    lengths = ends - starts
    total = int(lengths.sum())
    if total == 0:
        return out
    offsets = np.arange(total) - np.repeat(np.cumsum(lengths) - lengths, lengths)
    idx = np.repeat(starts, lengths) + offsets
    rows = idx % cand.height - y0
    cols = idx // cand.height - x0
    out[rows, cols] = True
    return out
