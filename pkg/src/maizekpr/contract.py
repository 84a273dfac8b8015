"""Mask contract files, metadata sidecars, and annotation files.

The mask contract is the interface between mask producers (the synthetic
generator, or an external segmentation adapter) and this engine: one JSON
document per ear image holding the image dimensions, a provenance stamp
from whatever produced the masks, and the raw candidate list. Writers must
be deterministic so that identical inputs give byte-identical files; the
JSON is therefore dumped with sorted keys and no incidental whitespace.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .core import EarRecord, GroundTruthAnnotation, MaskCandidate, validate_candidate
from .errors import ContractError

CONTRACT_SCHEMA = "maizekpr-mask-contract/1"


@dataclass
class ContractDoc:
    """In-memory form of one mask contract file."""

    ear_id: str
    width: int
    height: int
    candidates: list[MaskCandidate]
    generator: dict = field(default_factory=dict)
    source_image: str = ""


def write_contract(path, doc: ContractDoc) -> None:
    obj = {
        "schema": CONTRACT_SCHEMA,
        "ear_id": doc.ear_id,
        "source_image": doc.source_image,
        "image": {"width": doc.width, "height": doc.height},
        "generator": doc.generator,
        "candidates": [
            {
                "id": c.id,
                "bbox": list(c.bbox),
                "area": c.area,
                "quality_score": c.quality_score,
                "stability_score": c.stability_score,
                "rle": list(c.rle),
            }
            for c in doc.candidates
        ],
    }
    Path(path).write_text(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")


def load_contract(path) -> ContractDoc:
    """Parse and validate one contract file.

    Every candidate is checked against the ingestion invariants (RLE sum,
    stored area and bbox agreeing with the decoded mask). Any violation
    raises ContractError naming the file: a bad candidate means a buggy
    producer, so the whole document is refused rather than patched up.
    """
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ContractError(f"{path}: unreadable contract file ({exc})") from exc
    try:
        if obj["schema"] != CONTRACT_SCHEMA:
            raise ContractError(f"{path}: unknown schema {obj['schema']!r}")
        width = int(obj["image"]["width"])
        height = int(obj["image"]["height"])
        doc = ContractDoc(
            ear_id=str(obj["ear_id"]),
            width=width,
            height=height,
            candidates=[],
            generator=dict(obj.get("generator", {})),
            source_image=str(obj.get("source_image", "")),
        )
        for raw in obj["candidates"]:
            cand = MaskCandidate(
                id=str(raw["id"]),
                rle=tuple(int(v) for v in raw["rle"]),
                width=width,
                height=height,
                bbox=tuple(int(v) for v in raw["bbox"]),
                area=int(raw["area"]),
                quality_score=float(raw["quality_score"]),
                stability_score=float(raw["stability_score"]),
            )
            doc.candidates.append(cand)
    except ContractError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ContractError(f"{path}: malformed contract file ({exc})") from exc
    if width < 1 or height < 1:
        raise ContractError(f"{path}: bad image dimensions {width}x{height}")
    for cand in doc.candidates:
        try:
            validate_candidate(cand)
        except ContractError as exc:
            raise ContractError(f"{path}: {exc}") from exc
    return doc


def write_metadata_sidecar(path, source_image: str, records: list[EarRecord]) -> None:
    """Per-scene sidecar mapping extracted ear crops to their metadata."""
    obj = {
        "schema": "maizekpr-ear-metadata/1",
        "source_image": source_image,
        "ears": [
            {
                "ear_id": r.ear_id,
                "crop_offset": list(r.crop_offset),
                "metadata": dict(sorted(r.metadata.items())),
            }
            for r in records
        ],
    }
    Path(path).write_text(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")


def load_metadata_sidecar(path) -> list[EarRecord]:
    path = Path(path)
    obj = json.loads(path.read_text())
    source = str(obj.get("source_image", ""))
    records = []
    for raw in obj["ears"]:
        records.append(
            EarRecord(
                ear_id=str(raw["ear_id"]),
                source_image=source,
                crop_offset=tuple(int(v) for v in raw["crop_offset"]),
                metadata={str(k): str(v) for k, v in raw.get("metadata", {}).items()},
            )
        )
    return records


def write_annotation(path, ann: GroundTruthAnnotation) -> None:
    obj = {
        "schema": "maizekpr-annotation/1",
        "ear_id": ann.ear_id,
        "expert_path": [[float(x), float(y)] for x, y in ann.expert_path],
        "dots": [[float(x), float(y), label] for x, y, label in ann.dots],
    }
    Path(path).write_text(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")


def load_annotation(path) -> GroundTruthAnnotation:
    obj = json.loads(Path(path).read_text())
    return GroundTruthAnnotation(
        ear_id=str(obj["ear_id"]),
        expert_path=[(float(x), float(y)) for x, y in obj["expert_path"]],
        dots=[(float(x), float(y), str(label)) for x, y, label in obj["dots"]],
    )
