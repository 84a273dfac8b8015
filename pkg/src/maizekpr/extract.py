"""Scene-level ear isolation: HSV thresholding plus connected components.

Scenes show several ears laid tips-up on a black backdrop, so the value
channel is strongly bimodal and an Otsu cut separates ears from backdrop
without tuning. Tags, rulers and other bench furniture are removed by an
area/aspect filter: ears are tall blobs, distractors are small or squat.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .core import EarRecord
from .errors import NoEarsFoundError

EIGHT_CONNECTED = np.ones((3, 3), dtype=int)


@dataclass
class ExtractConfig:
    """Knobs for scene segmentation and the ear-vs-distractor filter.

    ``threshold`` is either the string ``"otsu"`` or a fixed integer cut
    in [0, 255] applied to the value channel (foreground where V > t).
    """

    threshold: int | str = "otsu"
    min_area_fraction: float = 0.01
    aspect_min: float = 1.5
    aspect_max: float = float("inf")
    padding_px: int = 10

    def validate(self) -> None:
        if isinstance(self.threshold, str):
            if self.threshold != "otsu":
                raise ValueError(f"unknown threshold rule {self.threshold!r}")
        elif not 0 <= int(self.threshold) <= 255:
            raise ValueError(f"fixed threshold {self.threshold} outside [0, 255]")
        if not 0 < self.min_area_fraction < 1:
            raise ValueError("min_area_fraction must be in (0, 1)")
        if self.aspect_min < 0 or self.aspect_max < self.aspect_min:
            raise ValueError("need 0 <= aspect_min <= aspect_max")
        if self.padding_px < 0:
            raise ValueError("padding_px must be >= 0")


# eq=False: the ndarray field has no useful element-wise equality
@dataclass(frozen=True, eq=False)
class SceneComponent:
    """One 8-connected foreground blob of the scene mask."""

    label: int
    pixel_count: int
    bbox: tuple[int, int, int, int]
    aspect_ratio: float
    mask: np.ndarray  # bool, bbox-local


def rgb_to_hsv(image) -> np.ndarray:
    """Hexcone RGB -> HSV. H in degrees [0, 360), S and V in [0, 255].

    V is the max channel, matching the standard definition; computed in
    float so no rounding is introduced before thresholding.
    """
    rgb = np.asarray(image)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError("expected an (h, w, 3) RGB array")
    arr = rgb.astype(np.float64)
    r, g, b = arr[..., 0], arr[..., 1], arr[..., 2]
    maxc = arr.max(axis=-1)
    minc = arr.min(axis=-1)
    delta = maxc - minc
    sat = np.where(maxc > 0, 255.0 * delta / np.where(maxc > 0, maxc, 1.0), 0.0)
    safe = np.where(delta > 0, delta, 1.0)
    hue = np.zeros_like(maxc)
    rmax = (delta > 0) & (maxc == r)
    gmax = (delta > 0) & (maxc == g) & ~rmax
    bmax = (delta > 0) & ~rmax & ~gmax
    hue = np.where(rmax, 60.0 * (g - b) / safe, hue)
    hue = np.where(gmax, 60.0 * (b - r) / safe + 120.0, hue)
    hue = np.where(bmax, 60.0 * (r - g) / safe + 240.0, hue)
    hue %= 360.0
    return np.stack([hue, sat, maxc], axis=-1)


def otsu_threshold(values) -> int:
    """Threshold maximising between-class variance over all 256 cuts.

    The cut splits at ``value <= t`` / ``value > t``; the smallest
    maximiser is returned so the choice is deterministic. A constant
    image has no valid two-class cut and yields 0.
    """
    v = np.asarray(values)
    hist = np.bincount(np.clip(v.astype(np.int64).ravel(), 0, 255), minlength=256).astype(np.float64)
    p = hist / hist.sum()
    omega = np.cumsum(p)
    mu = np.cumsum(p * np.arange(256))
    mu_total = mu[-1]
    denom = omega * (1.0 - omega)
    with np.errstate(divide="ignore", invalid="ignore"):
        sigma_b = (mu_total * omega - mu) ** 2 / denom
    sigma_b[denom <= 0] = -1.0
    return int(np.argmax(sigma_b))


def threshold_value(hsv, rule: int | str = "otsu") -> np.ndarray:
    """Binary mask of the value channel, foreground where V > t."""
    v = np.asarray(hsv)[..., 2]
    if isinstance(rule, str):
        if rule != "otsu":
            raise ValueError(f"unknown threshold rule {rule!r}")
        t = otsu_threshold(v)
    else:
        t = int(rule)
        if not 0 <= t <= 255:
            raise ValueError(f"fixed threshold {t} outside [0, 255]")
    return v > t


def connected_components(mask) -> list[SceneComponent]:
    """8-connected components of a bool mask, sorted left to right.

    Sorting is by bbox x (ties by bbox y, then label), so the returned
    order never depends on scan order of the labelling pass.
    """
    arr = np.asarray(mask, dtype=bool)
    labels, n = ndimage.label(arr, structure=EIGHT_CONNECTED)
    comps = []
    for lab, sl in enumerate(ndimage.find_objects(labels), start=1):
        if sl is None:
            continue
        ys, xs = sl
        region = labels[sl] == lab
        bbox = (int(xs.start), int(ys.start), int(xs.stop - xs.start), int(ys.stop - ys.start))
        comps.append(
            SceneComponent(
                label=lab,
                pixel_count=int(region.sum()),
                bbox=bbox,
                aspect_ratio=bbox[3] / bbox[2],
                mask=region,
            )
        )
    comps.sort(key=lambda c: (c.bbox[0], c.bbox[1], c.label))
    return comps


def extract_ears(image, cfg: ExtractConfig | None = None, source_name: str = "scene"):
    """Isolate individual ears from a multi-ear scene image.

    Returns ``[(crop, EarRecord), ...]`` ordered left to right; the crop is
    the padded bbox window copied out of the source image and the record
    carries the crop offset so downstream coordinates can be mapped back.
    Raises NoEarsFoundError when nothing passes the area/aspect filter.
    """
    cfg = cfg or ExtractConfig()
    cfg.validate()
    rgb = np.asarray(image)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError("expected an (h, w, 3) RGB array")
    h, w = rgb.shape[:2]
    mask = threshold_value(rgb_to_hsv(rgb), cfg.threshold)
    min_area = cfg.min_area_fraction * w * h
    kept = [
        c
        for c in connected_components(mask)
        if c.pixel_count >= min_area and cfg.aspect_min <= c.aspect_ratio <= cfg.aspect_max
    ]
    if not kept:
        raise NoEarsFoundError(f"{source_name}: no component passed the ear filters")
    out = []
    pad = cfg.padding_px
    for i, comp in enumerate(kept):
        bx, by, bw, bh = comp.bbox
        x0 = max(0, bx - pad)
        y0 = max(0, by - pad)
        x1 = min(w, bx + bw + pad)
        y1 = min(h, by + bh + pad)
        crop = rgb[y0:y1, x0:x1].copy()
        record = EarRecord(
            ear_id=f"{source_name}_{i:02d}",
            source_image=source_name,
            crop_offset=(x0, y0),
            metadata={},
        )
        out.append((crop, record))
    return out
