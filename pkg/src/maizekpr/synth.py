"""Synthetic ears and scenes with construction-known ground truth.

Kernels are filled ellipses on a column lattice: one column per visible
maize row, ``kernels_per_row`` kernels per column. Columns near the
midline get a slightly stretched vertical pitch, imitating the convex
outline of a real ear. That detail is what makes the generator a sound
oracle: the lowest and highest kernels land on the midline column and the
second-lowest/second-highest land together on the column beside it, so
the endpoint rule of the row tracer starts and ends on one full row and,
with zero jitter, the traced path is exactly that column.

The stretch profile is gentle on purpose. Too strong a stretch makes
midline rows expensive enough that the cheapest path drifts sideways
through diagonal steps; the defaults keep the worst-case drift saving
well under the cost of leaving and re-entering a column. Exact recovery
of the per-row count on all three paths additionally needs enough rows
for each half to hold two full columns, i.e. ``rows >= 7``; narrower
ears still trace the center row exactly but clip the half paths.

Randomness comes from numpy's default PCG64 generator seeded from the
spec, so output is reproducible bit for bit. Jitter draws are truncated
at three standard deviations, which guarantees the fallback used when a
draw would overlap a neighbour (shrinking the offset toward the lattice
point) always terminates in a conflict-free position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import MaskCandidate
from .errors import LayoutOverlapError, SpecInfeasibleError
from .filtering import _cropped_iou

PROFILE_BETA = 0.10    # fractional pitch stretch of the midline column
PROFILE_SLOPE = 0.12   # per-column falloff of the stretch profile
PROFILE_ASYM = 0.06    # right-of-midline boost; breaks mirror ties in the y-sort
IMMATURE_SCALE = 0.78  # radius scale of under-developed tip kernels
OVERLAP_GUARD = 0.35   # max pairwise IoU accepted while placing jittered kernels
MAX_REDRAWS = 16


@dataclass
class SyntheticEarSpec:
    """Parametric description of one generated ear.

    ``kernel_rx``/``kernel_ry`` are the ellipse radii of a mature kernel;
    tip kernels flagged immature use the same shape scaled by
    ``IMMATURE_SCALE``. ``row_spacing`` is the vertical pitch along a row,
    ``col_spacing`` the horizontal pitch between rows. ``curvature`` bows
    all rows laterally by up to that many pixels.
    """

    rows: int = 14
    kernels_per_row: int = 30
    kernel_rx: float = 28.0
    kernel_ry: float = 24.0
    row_spacing: float = 62.0
    col_spacing: float = 80.0
    jitter_px: float = 0.0
    immature_tip: int = 0
    curvature: float = 0.0
    seed: int = 0

    def validate(self) -> None:
        if self.rows < 1 or self.kernels_per_row < 1:
            raise ValueError("rows and kernels_per_row must be >= 1")
        if self.kernel_rx <= 0 or self.kernel_ry <= 0:
            raise ValueError("kernel radii must be positive")
        if self.row_spacing <= 0 or self.col_spacing <= 0:
            raise ValueError("spacings must be positive")
        if self.jitter_px < 0:
            raise ValueError("jitter_px must be >= 0")
        if not 0 <= self.immature_tip <= self.kernels_per_row:
            raise ValueError("immature_tip must be in [0, kernels_per_row]")


@dataclass
class EarTruth:
    """Construction parameters that double as ground truth."""

    kernels_per_row: int
    immature_tip: int
    width: int
    height: int
    centers: np.ndarray  # (rows, kernels_per_row, 2) final kernel centers

    @property
    def mature_per_row(self) -> int:
        return self.kernels_per_row - self.immature_tip


def candidate_id(col: int, level: int) -> str:
    """Stable id of the kernel at lattice slot (col, level); level 0 is the tip."""
    return f"k_c{col:03d}_l{level:03d}"


def _stretch_profile(rows: int) -> np.ndarray:
    mid = rows // 2
    d = np.abs(np.arange(rows) - mid)
    p = np.maximum(0.0, 1.0 - PROFILE_SLOPE * d)
    boost = np.where(np.arange(rows) > mid, 1.0 + PROFILE_ASYM, 1.0)
    return 1.0 + PROFILE_BETA * p * boost


def _margins(spec: SyntheticEarSpec) -> tuple[float, float]:
    mx = spec.kernel_rx + 3.0 * spec.jitter_px + abs(spec.curvature) + 4.0
    my = spec.kernel_ry + 3.0 * spec.jitter_px + 4.0
    return mx, my


def canvas_size(spec: SyntheticEarSpec) -> tuple[int, int]:
    """Frame size that contains every kernel of the spec with headroom."""
    mx, my = _margins(spec)
    s_max = float(_stretch_profile(spec.rows).max())
    width = math.ceil(2 * mx + (spec.rows - 1) * spec.col_spacing)
    height = math.ceil(2 * my + (spec.kernels_per_row - 1) * spec.row_spacing * s_max)
    return width, height


class _Placed:
    """Rendered ellipse: column segments plus the bbox-local bitmap."""

    __slots__ = ("cols", "r0", "r1", "bbox", "area", "crop")

    def __init__(self, cols, r0, r1):
        self.cols = cols
        self.r0 = r0
        self.r1 = r1
        x0, x1 = int(cols[0]), int(cols[-1])
        y0, y1 = int(r0.min()), int(r1.max())
        self.bbox = (x0, y0, x1 - x0 + 1, y1 - y0 + 1)
        self.area = int((r1 - r0 + 1).sum())
        crop = np.zeros((self.bbox[3], self.bbox[2]), dtype=bool)
        for c, a, b in zip(cols, r0, r1):
            crop[a - y0 : b - y0 + 1, c - x0] = True
        self.crop = crop


def _render(cx: float, cy: float, rx: float, ry: float, width: int, height: int):
    """Rasterise a filled ellipse; None when it leaves the frame."""
    px0 = math.ceil(cx - rx)
    px1 = math.floor(cx + rx)
    cols = np.arange(px0, px1 + 1)
    dx = (cols - cx) / rx
    span = ry * np.sqrt(np.maximum(0.0, 1.0 - dx * dx))
    r0 = np.ceil(cy - span).astype(np.int64)
    r1 = np.floor(cy + span).astype(np.int64)
    ok = r1 >= r0
    cols, r0, r1 = cols[ok], r0[ok], r1[ok]
    if cols.size == 0:
        return None
    if cols[0] < 0 or cols[-1] >= width or r0.min() < 0 or r1.max() >= height:
        return None
    return _Placed(cols, r0, r1)


def _conflicts(rec: _Placed, neighbors) -> bool:
    for other in neighbors:
        overlap = _cropped_iou(rec.bbox, rec.crop, rec.area, other.bbox, other.crop, other.area)
        if overlap > OVERLAP_GUARD:
            return True
    return False


def _runs_from_segments(rec: _Placed, height: int, total: int) -> tuple[int, ...]:
    runs: list[int] = []
    pos = 0
    for c, a, b in zip(rec.cols, rec.r0, rec.r1):
        start = int(c) * height + int(a)
        runs.append(start - pos)
        runs.append(int(b) - int(a) + 1)
        pos = start + int(b) - int(a) + 1
    if pos < total:
        runs.append(total - pos)
    return tuple(runs)


def generate_ear(spec: SyntheticEarSpec):
    """Produce the candidate list and ground truth for one ear.

    Deterministic for a fixed spec. Every candidate survives contract
    validation by construction, and no two masks overlap beyond
    ``OVERLAP_GUARD`` (< the 0.4 dedup limit), so the downstream filter
    keeps all of them and the per-row count is exactly
    ``kernels_per_row``. Raises SpecInfeasibleError when the spacing
    cannot keep unjittered neighbours overlap-free.
    """
    spec.validate()
    if spec.col_spacing < 2 * spec.kernel_rx + 2 or spec.row_spacing < 2 * spec.kernel_ry + 2:
        raise SpecInfeasibleError(
            f"spacing ({spec.col_spacing}, {spec.row_spacing}) too tight for "
            f"kernel radii ({spec.kernel_rx}, {spec.kernel_ry})"
        )
    rng = np.random.default_rng(spec.seed)
    R, K = spec.rows, spec.kernels_per_row
    width, height = canvas_size(spec)
    stretch = _stretch_profile(R)
    mx, my = _margins(spec)
    ymid = height / 2.0
    half = (K - 1) / 2.0
    bow = (
        spec.curvature * np.sin(np.pi * np.arange(K) / max(K - 1, 1))
        if spec.curvature
        else np.zeros(K)
    )

    placed: dict[tuple[int, int], _Placed] = {}
    candidates: list[MaskCandidate] = []
    centers = np.zeros((R, K, 2))
    total = width * height
    clamp = 3.0 * spec.jitter_px
    for c in range(R):
        pitch = spec.row_spacing * stretch[c]
        for l in range(K):
            bx = mx + c * spec.col_spacing + bow[l]
            by = ymid + (l - half) * pitch
            if l < spec.immature_tip:
                rx, ry = spec.kernel_rx * IMMATURE_SCALE, spec.kernel_ry * IMMATURE_SCALE
            else:
                rx, ry = spec.kernel_rx, spec.kernel_ry
            near = [
                placed[(c + dc, l + dl)]
                for dc in (-2, -1, 0)
                for dl in range(-3, 4)
                if (c + dc, l + dl) in placed
            ]
            rec = None
            if spec.jitter_px > 0:
                off = np.zeros(2)
                for _ in range(MAX_REDRAWS):
                    off = np.clip(rng.normal(0.0, spec.jitter_px, 2), -clamp, clamp)
                    trial = _render(bx + off[0], by + off[1], rx, ry, width, height)
                    if trial is not None and not _conflicts(trial, near):
                        rec = trial
                        break
                while rec is None:
                    # deterministic fallback: shrink toward the lattice point,
                    # which the 3-sigma clamp keeps conflict-free at sane jitter
                    at_origin = abs(off[0]) < 0.25 and abs(off[1]) < 0.25
                    if at_origin:
                        off[:] = 0.0
                    trial = _render(bx + off[0], by + off[1], rx, ry, width, height)
                    if trial is not None and not _conflicts(trial, near):
                        rec = trial
                    elif at_origin:
                        raise SpecInfeasibleError(
                            "jitter too large for the spacing: lattice slot "
                            f"({c}, {l}) cannot be placed without overlap"
                        )
                    else:
                        off *= 0.5
                cx, cy = bx + off[0], by + off[1]
            else:
                rec = _render(bx, by, rx, ry, width, height)
                if rec is None or _conflicts(rec, near):
                    raise SpecInfeasibleError("unjittered lattice violates the overlap guard")
                cx, cy = bx, by
            placed[(c, l)] = rec
            centers[c, l] = (cx, cy)
            candidates.append(
                MaskCandidate(
                    id=candidate_id(c, l),
                    rle=_runs_from_segments(rec, height, total),
                    width=width,
                    height=height,
                    bbox=rec.bbox,
                    area=rec.area,
                    quality_score=round(float(rng.uniform(0.94, 0.995)), 6),
                    stability_score=round(float(rng.uniform(0.94, 0.995)), 6),
                )
            )
    truth = EarTruth(
        kernels_per_row=K,
        immature_tip=spec.immature_tip,
        width=width,
        height=height,
        centers=centers,
    )
    return candidates, truth


@dataclass
class SceneTruth:
    """Layout facts of a composed scene, in the order the slots were given."""

    ear_boxes: list[tuple[int, int, int, int]] = field(default_factory=list)
    distractor_boxes: list[tuple[int, int, int, int]] = field(default_factory=list)


def generate_scene(ear_specs, offsets, distractors=(), border: int = 12):
    """Compose a black-backdrop scene of bright ear silhouettes.

    ``offsets`` holds the top-left corner of each ear's slot; slot size
    comes from the matching spec's canvas. ``distractors`` are extra
    bright rectangles (x, y, w, h) standing in for tags or labels. Any
    overlap among slots and distractors raises LayoutOverlapError.
    Returns the uint8 RGB image and the layout truth.
    """
    ear_specs = list(ear_specs)
    offsets = [tuple(int(v) for v in o) for o in offsets]
    if len(ear_specs) != len(offsets):
        raise ValueError("need one offset per ear spec")
    boxes = []
    for spec, (ox, oy) in zip(ear_specs, offsets):
        w, h = canvas_size(spec)
        if ox < 0 or oy < 0:
            raise ValueError("offsets must be non-negative")
        boxes.append((ox, oy, w, h))
    distractor_boxes = [tuple(int(v) for v in d) for d in distractors]
    everything = boxes + distractor_boxes
    for i in range(len(everything)):
        for j in range(i + 1, len(everything)):
            ax, ay, aw, ah = everything[i]
            bx, by, bw, bh = everything[j]
            if min(ax + aw, bx + bw) > max(ax, bx) and min(ay + ah, by + bh) > max(ay, by):
                raise LayoutOverlapError(f"layout slots {i} and {j} overlap")

    width = max((x + w for x, y, w, h in everything), default=0) + border
    height = max((y + h for x, y, w, h in everything), default=0) + border
    width = max(width, 32)
    height = max(height, 32)
    image = np.zeros((height, width, 3), dtype=np.uint8)
    for x, y, w, h in boxes:
        yy, xx = np.mgrid[y : y + h, x : x + w]
        cx, cy = x + w / 2.0, y + h / 2.0
        inside = ((xx - cx) / (w / 2.0 - 2)) ** 2 + ((yy - cy) / (h / 2.0 - 2)) ** 2 <= 1.0
        image[y : y + h, x : x + w][inside] = (212, 182, 96)
    for x, y, w, h in distractor_boxes:
        image[y : y + h, x : x + w] = (230, 230, 230)
    return image, SceneTruth(ear_boxes=boxes, distractor_boxes=distractor_boxes)
