import colorsys

import numpy as np
import pytest

from maizekpr.errors import NoEarsFoundError
from maizekpr.extract import (
    ExtractConfig,
    connected_components,
    extract_ears,
    otsu_threshold,
    rgb_to_hsv,
    threshold_value,
)
from maizekpr.synth import SyntheticEarSpec, generate_scene


def _hsv_oracle(r, g, b):
    # independent scalar implementation via the stdlib hexcone conversion
    hh, ss, vv = colorsys.rgb_to_hsv(r / 255.0, g / 255.0, b / 255.0)
    return hh * 360.0, ss * 255.0, vv * 255.0


def test_rgb_to_hsv_black():
    hsv = rgb_to_hsv(np.zeros((1, 1, 3), np.uint8))
    assert hsv[0, 0, 2] == 0.0


def test_rgb_to_hsv_pure_red():
    hsv = rgb_to_hsv(np.array([[[255, 0, 0]]], np.uint8))
    h, s, v = hsv[0, 0]
    assert (h, s, v) == (0.0, 255.0, 255.0)


def test_rgb_to_hsv_derived_pixel():
    hsv = rgb_to_hsv(np.array([[[10, 200, 30]]], np.uint8))
    expected = _hsv_oracle(10, 200, 30)
    assert np.allclose(hsv[0, 0], expected, atol=1e-9)


def test_rgb_to_hsv_matches_oracle_on_random_pixels():
    rng = np.random.default_rng(1)
    img = rng.integers(0, 256, size=(8, 8, 3), dtype=np.uint8)
    hsv = rgb_to_hsv(img)
    for y in range(8):
        for x in range(8):
            r, g, b = (int(v) for v in img[y, x])
            assert np.allclose(hsv[y, x], _hsv_oracle(r, g, b), atol=1e-9)


def test_rgb_to_hsv_v_is_max_channel():
    rng = np.random.default_rng(2)
    img = rng.integers(0, 256, size=(16, 16, 3), dtype=np.uint8)
    assert (rgb_to_hsv(img)[..., 2] == img.max(axis=-1)).all()


def _otsu_oracle(values):
    # brute force over all 256 cut points, maximising w0*w1*(mu0-mu1)^2
    values = np.asarray(values).ravel()
    best_t, best_sigma = 0, -1.0
    for t in range(256):
        lo = values[values <= t]
        hi = values[values > t]
        if lo.size == 0 or hi.size == 0:
            continue
        w0, w1 = lo.size / values.size, hi.size / values.size
        sigma = w0 * w1 * (lo.mean() - hi.mean()) ** 2
        if sigma > best_sigma:
            best_sigma, best_t = sigma, t
    return best_t


def test_threshold_all_black_fixed():
    img = np.zeros((4, 4, 3), np.uint8)
    mask = threshold_value(rgb_to_hsv(img), 10)
    assert not mask.any()


def test_threshold_otsu_bimodal():
    img = np.zeros((4, 4, 3), np.uint8)
    img[:, 2:] = 255
    mask = threshold_value(rgb_to_hsv(img), "otsu")
    assert mask[:, 2:].all() and not mask[:, :2].any()


def test_otsu_against_bruteforce_bimodal_16px():
    values = np.array([0] * 8 + [200] * 8)
    assert otsu_threshold(values) == _otsu_oracle(values)


def test_otsu_against_bruteforce_random():
    rng = np.random.default_rng(9)
    for _ in range(25):
        values = rng.integers(0, 256, size=int(rng.integers(8, 64)))
        assert otsu_threshold(values) == _otsu_oracle(values)


def _flood_fill_components(mask):
    # 8-connectivity brute-force oracle
    h, w = mask.shape
    seen = np.zeros_like(mask, dtype=bool)
    comps = []
    for y in range(h):
        for x in range(w):
            if mask[y, x] and not seen[y, x]:
                stack, members = [(y, x)], set()
                seen[y, x] = True
                while stack:
                    cy, cx = stack.pop()
                    members.add((cx, cy))
                    for dy in (-1, 0, 1):
                        for dx in (-1, 0, 1):
                            ny, nx = cy + dy, cx + dx
                            if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not seen[ny, nx]:
                                seen[ny, nx] = True
                                stack.append((ny, nx))
                comps.append(members)
    return comps


def test_components_empty():
    assert connected_components(np.zeros((5, 5), bool)) == []


def test_components_two_squares():
    mask = np.zeros((10, 10), bool)
    mask[1:4, 1:4] = True
    mask[6:9, 6:9] = True
    comps = connected_components(mask)
    assert len(comps) == 2
    assert all(c.pixel_count == 9 for c in comps)


def test_components_diagonal_touch_is_one():
    mask = np.zeros((4, 4), bool)
    mask[0, 0] = True
    mask[1, 1] = True
    assert len(connected_components(mask)) == 1


def test_components_match_flood_fill_oracle():
    rng = np.random.default_rng(21)
    for _ in range(100):
        h = int(rng.integers(2, 17))
        w = int(rng.integers(2, 17))
        mask = rng.random((h, w)) < 0.45
        comps = connected_components(mask)
        oracle = _flood_fill_components(mask)
        assert len(comps) == len(oracle)
        got = []
        for c in comps:
            x0, y0, bw, bh = c.bbox
            ys, xs = np.nonzero(c.mask)
            got.append({(int(x0 + x), int(y0 + y)) for y, x in zip(ys, xs)})
        assert sorted(map(sorted, got)) == sorted(map(sorted, oracle))


def _scene(n_ears, distractors=(), shuffle_seed=None):
    specs = [
        SyntheticEarSpec(rows=6, kernels_per_row=14, kernel_rx=10, kernel_ry=8,
                         row_spacing=22, col_spacing=26, seed=i)
        for i in range(n_ears)
    ]
    offsets = [(40 + i * 260, 35 + 7 * i) for i in range(n_ears)]
    if shuffle_seed is not None:
        order = np.random.default_rng(shuffle_seed).permutation(n_ears)
        specs = [specs[i] for i in order]
        offsets = [offsets[i] for i in order]
    return generate_scene(specs, offsets, distractors=distractors)


def test_extract_four_ears_left_to_right():
    image, truth = _scene(4)
    pairs = extract_ears(image, ExtractConfig(min_area_fraction=0.005))
    assert len(pairs) == 4
    offsets = [rec.crop_offset[0] for _, rec in pairs]
    assert offsets == sorted(offsets)
    expected_x = sorted(b[0] for b in truth.ear_boxes)
    for (crop, rec), ex in zip(pairs, expected_x):
        assert abs(rec.crop_offset[0] - ex) <= ExtractConfig().padding_px + 4


def test_extract_ignores_small_tag_blob():
    image, _ = _scene(4, distractors=[(60, 700, 18, 12), (700, 700, 16, 16)])
    pairs = extract_ears(image, ExtractConfig(min_area_fraction=0.005))
    assert len(pairs) == 4


def test_extract_all_black_raises():
    image = np.zeros((64, 64, 3), np.uint8)
    with pytest.raises(NoEarsFoundError):
        extract_ears(image)


def test_extract_crop_fidelity():
    image, _ = _scene(2)
    for crop, rec in extract_ears(image, ExtractConfig(min_area_fraction=0.005)):
        x0, y0 = rec.crop_offset
        h, w = crop.shape[:2]
        assert (crop == image[y0 : y0 + h, x0 : x0 + w]).all()


def test_extract_order_independent_of_layout_order():
    baseline, _ = _scene(4)
    shuffled, _ = _scene(4, shuffle_seed=3)
    cfg = ExtractConfig(min_area_fraction=0.005)
    a = [rec.crop_offset for _, rec in extract_ears(baseline, cfg)]
    b = [rec.crop_offset for _, rec in extract_ears(shuffled, cfg)]
    assert a == b
