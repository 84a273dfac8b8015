import numpy as np
import pytest

from maizekpr.contract import (
    ContractDoc,
    load_annotation,
    load_contract,
    load_metadata_sidecar,
    write_annotation,
    write_contract,
    write_metadata_sidecar,
)
from maizekpr.core import EarRecord, GroundTruthAnnotation, MaskCandidate, mask_stats
from maizekpr.errors import ContractError
from maizekpr.rle import rle_encode


def _doc(n=3, w=16, h=12):
    rng = np.random.default_rng(5)
    cands = []
    for i in range(n):
        mask = np.zeros((h, w), bool)
        x = int(rng.integers(0, w - 3))
        y = int(rng.integers(0, h - 3))
        mask[y : y + 3, x : x + 3] = True
        area, bbox = mask_stats(mask)
        cands.append(
            MaskCandidate(
                id=f"m{i}",
                rle=tuple(rle_encode(mask)),
                width=w,
                height=h,
                bbox=bbox,
                area=area,
                quality_score=0.95,
                stability_score=0.96,
            )
        )
    return ContractDoc(ear_id="ear7", width=w, height=h, candidates=cands, generator={"name": "t"})


def test_contract_roundtrip(tmp_path):
    doc = _doc()
    path = tmp_path / "ear7.json"
    write_contract(path, doc)
    loaded = load_contract(path)
    assert loaded.ear_id == "ear7"
    assert loaded.width == doc.width and loaded.height == doc.height
    assert loaded.candidates == doc.candidates
    assert loaded.generator == {"name": "t"}


def test_contract_write_is_deterministic(tmp_path):
    doc = _doc()
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    write_contract(p1, doc)
    write_contract(p2, doc)
    assert p1.read_bytes() == p2.read_bytes()


def test_load_rejects_area_mismatch(tmp_path):
    doc = _doc()
    bad = doc.candidates[1]
    doc.candidates[1] = MaskCandidate(
        id=bad.id,
        rle=bad.rle,
        width=bad.width,
        height=bad.height,
        bbox=bad.bbox,
        area=bad.area + 1,
        quality_score=bad.quality_score,
        stability_score=bad.stability_score,
    )
    path = tmp_path / "bad.json"
    write_contract(path, doc)
    with pytest.raises(ContractError, match="area"):
        load_contract(path)


def test_load_rejects_garbage_file(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    with pytest.raises(ContractError):
        load_contract(path)


def test_load_rejects_wrong_schema(tmp_path):
    path = tmp_path / "schema.json"
    path.write_text('{"schema": "other/9", "candidates": []}')
    with pytest.raises(ContractError, match="schema"):
        load_contract(path)


def test_metadata_sidecar_roundtrip(tmp_path):
    records = [
        EarRecord("scene_00", "scene.png", (12, 30), {"genotype": "B73", "plot": "7"}),
        EarRecord("scene_01", "scene.png", (400, 28), {}),
    ]
    path = tmp_path / "scene_meta.json"
    write_metadata_sidecar(path, "scene.png", records)
    loaded = load_metadata_sidecar(path)
    assert [r.ear_id for r in loaded] == ["scene_00", "scene_01"]
    assert loaded[0].crop_offset == (12, 30)
    assert loaded[0].metadata == {"genotype": "B73", "plot": "7"}


def test_annotation_roundtrip(tmp_path):
    ann = GroundTruthAnnotation(
        ear_id="e9",
        expert_path=[(1.0, 2.0), (3.5, 40.0)],
        dots=[(5.0, 6.0, "valid"), (7.0, 8.0, "invalid"), (1.0, 9.0, "expert_count")],
    )
    path = tmp_path / "e9.json"
    write_annotation(path, ann)
    loaded = load_annotation(path)
    assert loaded == ann
