import numpy as np
import pytest

from maizekpr.core import MaskCandidate, mask_stats
from maizekpr.errors import DimensionMismatchError
from maizekpr.filtering import FilterConfig, filter_masks, iou
from maizekpr.rle import rle_decode, rle_encode


def _iou_oracle(a, b):
    # pixel enumeration, no boolean algebra shortcuts
    inter = union = 0
    for y in range(a.shape[0]):
        for x in range(a.shape[1]):
            if a[y, x] and b[y, x]:
                inter += 1
            if a[y, x] or b[y, x]:
                union += 1
    return inter / union if union else 0.0


def _square(w, h, x, y, size):
    mask = np.zeros((h, w), bool)
    mask[y : y + size, x : x + size] = True
    return mask


def _candidate(mask, cand_id, quality=0.96, stability=0.97):
    h, w = mask.shape
    area, bbox = mask_stats(mask)
    return MaskCandidate(
        id=cand_id,
        rle=tuple(rle_encode(mask)),
        width=w,
        height=h,
        bbox=bbox,
        area=area,
        quality_score=quality,
        stability_score=stability,
    )


def test_iou_identical():
    m = _square(20, 20, 3, 3, 5)
    assert iou(m, m) == 1.0


def test_iou_disjoint():
    assert iou(_square(20, 20, 0, 0, 5), _square(20, 20, 10, 10, 5)) == 0.0


def test_iou_both_empty():
    assert iou(np.zeros((4, 4), bool), np.zeros((4, 4), bool)) == 0.0


def test_iou_half_overlap_thirds():
    # 10x10 squares at (0,0) and (5,0): intersection 50, union 150
    a = _square(20, 12, 0, 0, 10)
    b = _square(20, 12, 5, 0, 10)
    assert iou(a, b) == pytest.approx(1 / 3)
    assert iou(a, b) == pytest.approx(_iou_oracle(a, b))


def test_iou_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        iou(np.zeros((4, 4), bool), np.zeros((4, 5), bool))


def test_iou_matches_oracle_random():
    rng = np.random.default_rng(0)
    for _ in range(60):
        a = rng.random((9, 9)) < 0.4
        b = rng.random((9, 9)) < 0.4
        assert iou(a, b) == pytest.approx(_iou_oracle(a, b))


def _area_square(w, h, x, y, target_area, cand_id, **kw):
    size = int(round(target_area ** 0.5))
    mask = _square(w, h, x, y, size)
    return _candidate(mask, cand_id, **kw)


def test_filter_drops_small_area():
    cand = _area_square(300, 300, 10, 10, 500, "small")
    assert filter_masks([cand]) == []


def test_filter_keeps_clean_candidate():
    cand = _area_square(300, 300, 10, 10, 5041, "ok", stability=0.95)
    kernels = filter_masks([cand])
    assert len(kernels) == 1
    assert kernels[0].area == cand.area
    assert kernels[0].center == (cand.bbox[0] + cand.bbox[2] / 2, cand.bbox[1] + cand.bbox[3] / 2)


def test_filter_drops_low_score():
    low = _area_square(300, 300, 10, 10, 5041, "low", stability=0.5)
    assert filter_masks([low]) == []
    # but the other score field would keep it
    kernels = filter_masks([low], FilterConfig(score_field="quality"))
    assert len(kernels) == 1


def test_filter_overlap_discards_larger():
    # big square 78x78 (6084 px) vs small 55x55 (3025 px) nested inside:
    # IoU = 3025/6084 = 0.497 > 0.4, so the larger one goes
    big_mask = _square(300, 300, 50, 50, 78)
    small_mask = _square(300, 300, 60, 60, 55)
    overlap = iou(big_mask, small_mask)
    assert overlap == pytest.approx(_iou_oracle(big_mask, small_mask))
    assert overlap > 0.4
    kernels = filter_masks([_candidate(big_mask, "big"), _candidate(small_mask, "small")])
    assert len(kernels) == 1
    assert kernels[0].area == 3025


def _random_candidate_set(rng, frame=220):
    cands = []
    n = int(rng.integers(4, 16))
    for i in range(n):
        size = int(rng.integers(20, 110))  # areas from 400 to ~12000
        x = int(rng.integers(0, frame - size))
        y = int(rng.integers(0, frame - size))
        mask = _square(frame, frame, x, y, size)
        cands.append(
            _candidate(
                mask,
                f"r{i:03d}",
                quality=float(rng.uniform(0.5, 1.0)),
                stability=float(rng.uniform(0.5, 1.0)),
            )
        )
    return cands


def test_filter_postconditions_randomized():
    rng = np.random.default_rng(404)
    cfg = FilterConfig()
    for _ in range(150):
        cands = _random_candidate_set(rng)
        kernels = filter_masks(cands, cfg)
        by_id = {c.id: c for c in cands}
        survivors = [c for c in cands if any(k.bbox == c.bbox and k.area == c.area for k in kernels)]
        for k in kernels:
            assert cfg.area_min <= k.area <= cfg.area_max
        masks = {
            c.id: rle_decode(c.rle, c.width, c.height) for c in survivors
        }
        ids = sorted(masks)
        for i, a in enumerate(ids):
            for b in ids[i + 1 :]:
                assert iou(masks[a], masks[b]) <= cfg.iou_max + 1e-12
        for c in survivors:
            assert c.stability_score >= cfg.score_min


def test_filter_score_monotonicity():
    rng = np.random.default_rng(77)
    cands = _random_candidate_set(rng)
    n_loose = len(filter_masks(cands, FilterConfig(score_min=0.6)))
    n_tight = len(filter_masks(cands, FilterConfig(score_min=0.9)))
    assert n_tight <= n_loose


def test_filter_order_independence():
    rng = np.random.default_rng(15)
    for _ in range(30):
        cands = _random_candidate_set(rng)
        base = filter_masks(cands, FilterConfig(score_min=0.5))
        perm = [cands[i] for i in rng.permutation(len(cands))]
        assert filter_masks(perm, FilterConfig(score_min=0.5)) == base


def test_filter_empty_output_is_valid():
    assert filter_masks([]) == []
