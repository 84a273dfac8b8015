"""Quality control turning raw mask candidates into validated kernels.

Three rules run in order: an area window (multi-kernel blobs are large,
noise specks are small), a confidence floor on the chosen backend score,
and pairwise overlap deduplication that discards the larger mask of any
pair whose IoU exceeds the limit, since an oversized mask is one that
swallowed several kernels. Overlap processing scans candidates largest
first (area ties broken by id) and removes the current mask as soon as it
overlaps any smaller survivor; this keeps the maximum number of
single-kernel masks and makes the result independent of input order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Kernel, MaskCandidate, center_of_bbox, decode_cropped
from .errors import DimensionMismatchError

SCORE_FIELDS = ("stability", "quality")


@dataclass
class FilterConfig:
    area_min: int = 1000
    area_max: int = 10000
    score_min: float = 0.93
    score_field: str = "stability"
    iou_max: float = 0.4

    def validate(self) -> None:
        if not 0 < self.area_min < self.area_max:
            raise ValueError("need 0 < area_min < area_max")
        if not 0.0 <= self.score_min <= 1.0:
            raise ValueError("score_min must be in [0, 1]")
        if not 0.0 < self.iou_max < 1.0:
            raise ValueError("iou_max must be in (0, 1)")
        if self.score_field not in SCORE_FIELDS:
            raise ValueError(f"score_field must be one of {SCORE_FIELDS}")

    def score_of(self, cand: MaskCandidate) -> float:
        return cand.stability_score if self.score_field == "stability" else cand.quality_score


def iou(a, b) -> float:
    """Intersection over union of two same-shaped bool masks.

    Defined as 0 when both masks are empty.
    """
    am = np.asarray(a, dtype=bool)
    bm = np.asarray(b, dtype=bool)
    if am.shape != bm.shape:
        raise DimensionMismatchError(f"mask shapes differ: {am.shape} vs {bm.shape}")
    union = int(np.logical_or(am, bm).sum())
    if union == 0:
        return 0.0
    inter = int(np.logical_and(am, bm).sum())
    return inter / union


def _cropped_iou(box_a, crop_a, area_a, box_b, crop_b, area_b) -> float:
    """IoU via the bbox-local decodes; exact, never touches full frames."""
    ax, ay, aw, ah = box_a
    bx, by, bw, bh = box_b
    ix0, iy0 = max(ax, bx), max(ay, by)
    ix1, iy1 = min(ax + aw, bx + bw), min(ay + ah, by + bh)
    if ix1 <= ix0 or iy1 <= iy0:
        return 0.0
    sub_a = crop_a[iy0 - ay : iy1 - ay, ix0 - ax : ix1 - ax]
    sub_b = crop_b[iy0 - by : iy1 - by, ix0 - bx : ix1 - bx]
    inter = int(np.logical_and(sub_a, sub_b).sum())
    if inter == 0:
        return 0.0
    return inter / (area_a + area_b - inter)


def filter_masks(candidates, cfg: FilterConfig | None = None) -> list[Kernel]:
    """Apply the quality-control rules and emit kernels.

    Survivors are returned sorted by candidate id and given sequential
    integer ids, so the output is a pure function of the candidate *set*
    regardless of input ordering. An empty result is valid.
    """
    cfg = cfg or FilterConfig()
    cfg.validate()
    pool = [
        c
        for c in candidates
        if cfg.area_min <= c.area <= cfg.area_max and cfg.score_of(c) >= cfg.score_min
    ]
    if len(pool) > 1:
        pool = _drop_overlapping(pool, cfg.iou_max)
    pool.sort(key=lambda c: c.id)
    return [
        Kernel(id=i, bbox=tuple(c.bbox), center=center_of_bbox(c.bbox), area=c.area)
        for i, c in enumerate(pool)
    ]


def _drop_overlapping(pool: list[MaskCandidate], iou_max: float) -> list[MaskCandidate]:
    order = sorted(pool, key=lambda c: (-c.area, c.id))
    n = len(order)
    x0 = np.array([c.bbox[0] for c in order])
    y0 = np.array([c.bbox[1] for c in order])
    x1 = x0 + np.array([c.bbox[2] for c in order])
    y1 = y0 + np.array([c.bbox[3] for c in order])
    crops: dict[int, np.ndarray] = {}

    def crop(i: int) -> np.ndarray:
        if i not in crops:
            crops[i] = decode_cropped(order[i])
        return crops[i]

    alive = np.ones(n, dtype=bool)
    for i in range(n):
        # candidates after i in the ordering are the smaller (or same-area,
        # later-id) ones; drop i on its first excessive overlap with a survivor
        touching = (
            alive
            & (np.minimum(x1, x1[i]) > np.maximum(x0, x0[i]))
            & (np.minimum(y1, y1[i]) > np.maximum(y0, y0[i]))
        )
        touching[: i + 1] = False
        for j in np.flatnonzero(touching):
            overlap = _cropped_iou(
                order[i].bbox, crop(i), order[i].area, order[j].bbox, crop(j), order[j].area
            )
            if overlap > iou_max:
                alive[i] = False
                break
    return [c for i, c in enumerate(order) if alive[i]]
