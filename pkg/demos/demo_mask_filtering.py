"""What the mask quality-control stage keeps and why.

Starts from a clean synthetic ear, then injects three kinds of junk the
segmentation backend produces in practice: a tiny speck, a low-confidence
mask, and one oversized mask swallowing two kernels. The filter drops all
three and keeps every real kernel.
"""

import numpy as np

from maizekpr import FilterConfig, filter_masks, mask_stats, rle_encode
from maizekpr.core import MaskCandidate
from maizekpr.synth import SyntheticEarSpec, generate_ear


def blob(width, height, x, y, w, h, cand_id, quality=0.97, stability=0.97):
    mask = np.zeros((height, width), bool)
    mask[y : y + h, x : x + w] = True
    area, bbox = mask_stats(mask)
    return MaskCandidate(id=cand_id, rle=tuple(rle_encode(mask)), width=width, height=height,
                         bbox=bbox, area=area, quality_score=quality, stability_score=stability)


def double_mask(width, height, c1, c2, rx, ry, cand_id):
    # union of two kernel-shaped ellipses: a mask that swallowed both
    yy, xx = np.mgrid[0:height, 0:width]
    mask = np.zeros((height, width), bool)
    for cx, cy in (c1, c2):
        mask |= ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 <= 1.0
    area, bbox = mask_stats(mask)
    return MaskCandidate(id=cand_id, rle=tuple(rle_encode(mask)), width=width, height=height,
                         bbox=bbox, area=area, quality_score=0.97, stability_score=0.97)


spec = SyntheticEarSpec(rows=10, kernels_per_row=16, seed=5)
candidates, truth = generate_ear(spec)
w, h = truth.width, truth.height
print(f"clean ear: {len(candidates)} kernel masks")

# a noise speck (area below the lower bound)
candidates.append(blob(w, h, 5, 5, 12, 12, "zz_speck"))
# a shaky detection (confidence below the 0.93 floor)
candidates.append(blob(w, h, 5, 400, 60, 50, "zz_shaky", stability=0.80))
# one mask that swallowed two vertically adjacent kernels
candidates.append(double_mask(w, h, truth.centers[4, 7], truth.centers[4, 8],
                              spec.kernel_rx, spec.kernel_ry, "zz_double"))

cfg = FilterConfig()
kernels = filter_masks(candidates, cfg)
print(f"after filtering: {len(kernels)} kernels "
      f"(area in [{cfg.area_min}, {cfg.area_max}], {cfg.score_field} >= {cfg.score_min}, "
      f"pairwise IoU <= {cfg.iou_max})")
print("junk candidates dropped:", len(candidates) - len(kernels))
