import numpy as np
import pytest

from maizekpr.core import (
    GroundTruthAnnotation,
    MaskCandidate,
    candidate_geometry,
    center_of_bbox,
    decode_cropped,
    mask_stats,
    validate_candidate,
)
from maizekpr.errors import ContractError, DegenerateBoxError
from maizekpr.rle import rle_decode, rle_encode


def _candidate_from_mask(mask, cand_id="c0", **overrides):
    h, w = mask.shape
    area, bbox = mask_stats(mask)
    fields = dict(
        id=cand_id,
        rle=tuple(rle_encode(mask)),
        width=w,
        height=h,
        bbox=bbox,
        area=area,
        quality_score=0.95,
        stability_score=0.97,
    )
    fields.update(overrides)
    return MaskCandidate(**fields)


def test_mask_stats_empty():
    assert mask_stats(np.zeros((3, 4), bool)) == (0, None)


def test_mask_stats_full():
    assert mask_stats(np.ones((5, 4), bool)) == (20, (0, 0, 4, 5))


def test_mask_stats_two_pixels():
    # foreground at (x=1, y=1) and (x=3, y=2): bbox spans x 1..3, y 1..2
    mask = np.zeros((4, 5), bool)
    mask[1, 1] = True
    mask[2, 3] = True
    assert mask_stats(mask) == (2, (1, 1, 3, 2))


@pytest.mark.parametrize(
    "bbox,expected",
    [((0, 0, 10, 10), (5.0, 5.0)), ((4, 6, 2, 2), (5.0, 7.0)), ((3, 3, 5, 7), (5.5, 6.5))],
)
def test_center_of_bbox(bbox, expected):
    assert center_of_bbox(bbox) == expected


def test_center_of_bbox_degenerate():
    with pytest.raises(DegenerateBoxError):
        center_of_bbox((3, 3, 0, 5))
    with pytest.raises(DegenerateBoxError):
        center_of_bbox((3, 3, 5, -1))


def test_candidate_geometry_matches_mask_stats():
    rng = np.random.default_rng(3)
    for _ in range(300):
        h = int(rng.integers(2, 20))
        w = int(rng.integers(2, 20))
        mask = rng.random((h, w)) < 0.4
        if not mask.any():
            continue
        cand = _candidate_from_mask(mask)
        assert candidate_geometry(cand) == mask_stats(mask)


def test_validate_candidate_accepts_consistent():
    mask = np.zeros((6, 6), bool)
    mask[2:5, 1:4] = True
    validate_candidate(_candidate_from_mask(mask))


def test_validate_candidate_rejects_wrong_area():
    mask = np.zeros((6, 6), bool)
    mask[2:5, 1:4] = True
    cand = _candidate_from_mask(mask, area=8)
    with pytest.raises(ContractError, match="area"):
        validate_candidate(cand)


def test_validate_candidate_rejects_wrong_bbox():
    mask = np.zeros((6, 6), bool)
    mask[2:5, 1:4] = True
    cand = _candidate_from_mask(mask, bbox=(0, 2, 3, 3))
    with pytest.raises(ContractError, match="bbox"):
        validate_candidate(cand)


def test_validate_candidate_rejects_bad_scores():
    mask = np.zeros((4, 4), bool)
    mask[1, 1] = True
    with pytest.raises(ContractError, match="score"):
        validate_candidate(_candidate_from_mask(mask, quality_score=1.5))


def test_validate_candidate_rejects_empty_mask():
    cand = MaskCandidate(
        id="e",
        rle=(16,),
        width=4,
        height=4,
        bbox=(0, 0, 1, 1),
        area=0,
        quality_score=0.5,
        stability_score=0.5,
    )
    with pytest.raises(ContractError, match="empty"):
        validate_candidate(cand)


def test_decode_cropped_equals_full_decode_window():
    rng = np.random.default_rng(11)
    for _ in range(200):
        h = int(rng.integers(3, 24))
        w = int(rng.integers(3, 24))
        mask = rng.random((h, w)) < 0.3
        if not mask.any():
            continue
        cand = _candidate_from_mask(mask)
        x, y, bw, bh = cand.bbox
        full = rle_decode(cand.rle, w, h)
        assert (decode_cropped(cand) == full[y : y + bh, x : x + bw]).all()


def test_annotation_label_validation():
    GroundTruthAnnotation("e1", [(0, 0), (1, 1)], [(0.5, 0.5, "valid")])
    with pytest.raises(ValueError):
        GroundTruthAnnotation("e1", [], [(0.5, 0.5, "bogus")])


def test_annotation_count_dots():
    ann = GroundTruthAnnotation(
        "e1",
        [(0, 0)],
        [(1, 1, "valid"), (2, 2, "valid"), (3, 3, "invalid"), (4, 4, "expert_count")],
    )
    assert ann.count_dots("valid") == 2
    assert ann.count_dots("invalid") == 1
    assert ann.count_dots("expert_count") == 1
