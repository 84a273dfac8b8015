"""Batch pipeline driver.

Subcommands:

* ``extract`` - isolate ears from multi-ear scene images, write crops and
  metadata sidecars;
* ``count``   - run mask ingestion, filtering and three-path row tracing
  over a directory of contract files, write the results CSV and a timing
  report;
* ``synth``   - generate contract files plus a truth table from an ear
  spec file (one JSON object per line);
* ``eval``    - score a results CSV against a truth CSV;
* ``bench``   - per-stage timing over contract files, Table-style.

Exit codes: 0 success, 1 total failure, 2 partial failure. A failing ear
never aborts its batch: it becomes a flagged row in the results CSV.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields as dc_fields
from pathlib import Path

import numpy as np

from . import contract as contract_io
from .config import RunConfig, apply_overrides, load_config
from .contract import ContractDoc, load_contract, write_metadata_sidecar
from .errors import EngineError
from .evaluation import (
    EvalPair,
    accuracy_ratio,
    histogram,
    r_squared,
    r_squared_fit,
)
from .extract import extract_ears
from .filtering import filter_masks
from .multipath import three_path_kpr
from .synth import SyntheticEarSpec, generate_ear

log = logging.getLogger("maizekpr")

RESULT_COLUMNS = [
    "ear_id",
    "center_raw",
    "center_immature",
    "center_mature",
    "left_raw",
    "left_immature",
    "left_mature",
    "right_raw",
    "right_immature",
    "right_mature",
    "kpr_mean",
    "kpr_rounded",
    "flags",
    "error",
]

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp")


@dataclass
class TimingReport:
    """Per-ear wall-clock seconds for each pipeline stage."""

    extract_sec: list[float] = field(default_factory=list)
    ingest_filter_sec: list[float] = field(default_factory=list)
    row_count_sec: list[float] = field(default_factory=list)

    def mean(self, name: str) -> float:
        values = getattr(self, name)
        return float(np.mean(values)) if values else 0.0


def _count_one(args) -> dict:
    """Process one contract file; never raises (errors become row fields)."""
    path_str, cfg = args
    row = {c: "" for c in RESULT_COLUMNS}
    row["ear_id"] = Path(path_str).stem
    timing = {"ingest_filter_sec": 0.0, "row_count_sec": 0.0}
    try:
        t0 = time.perf_counter()
        doc = load_contract(path_str)
        row["ear_id"] = doc.ear_id
        kernels = filter_masks(doc.candidates, cfg.filter)
        timing["ingest_filter_sec"] = time.perf_counter() - t0

        t1 = time.perf_counter()
        result = three_path_kpr(kernels, doc.height, cfg.graph)
        timing["row_count_sec"] = time.perf_counter() - t1

        row["center_raw"], row["center_immature"], row["center_mature"] = (
            result.center.raw_count,
            result.center.immature_count,
            result.center.mature_count,
        )
        for name, p in (("left", result.left), ("right", result.right)):
            if p is not None:
                row[f"{name}_raw"] = p.raw_count
                row[f"{name}_immature"] = p.immature_count
                row[f"{name}_mature"] = p.mature_count
        row["kpr_mean"] = f"{result.kpr_mean:.6f}"
        row["kpr_rounded"] = result.kpr_rounded
        row["flags"] = ";".join(result.flags)
    except EngineError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}".replace("\n", " ")
    except Exception as exc:  # never let one ear sink the batch
        row["error"] = f"unexpected {type(exc).__name__}: {exc}".replace("\n", " ")
    row["__timing__"] = timing
    return row


def cmd_count(args) -> int:
    cfg = _load_cfg(args)
    if args.parallelism is not None:
        cfg.parallelism = args.parallelism
    cfg.validate()
    in_dir = Path(args.input)
    files = sorted(p for p in in_dir.glob("*.json") if p.is_file())
    if not files:
        log.error("no contract files in %s", in_dir)
        return 1
    tasks = [(str(p), cfg) for p in files]
    if cfg.parallelism > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallelism) as pool:
            rows = list(pool.map(_count_one, tasks, chunksize=8))
    else:
        rows = [_count_one(t) for t in tasks]

    report = TimingReport()
    for row in rows:
        timing = row.pop("__timing__")
        report.ingest_filter_sec.append(timing["ingest_filter_sec"])
        report.row_count_sec.append(timing["row_count_sec"])

    out_path = Path(args.output)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULT_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    if args.timing:
        _write_timing(args.timing, rows, report)

    failures = sum(1 for r in rows if r["error"])
    log.info(
        "count: %d ears, %d failed; mean ingest+filter %.3fs, mean row counting %.3fs",
        len(rows),
        failures,
        report.mean("ingest_filter_sec"),
        report.mean("row_count_sec"),
    )
    if failures == len(rows):
        return 1
    return 2 if failures else 0


def _write_timing(path, rows, report: TimingReport) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ear_id", "ingest_filter_sec", "row_count_sec"])
        for row, a, b in zip(rows, report.ingest_filter_sec, report.row_count_sec):
            writer.writerow([row["ear_id"], f"{a:.6f}", f"{b:.6f}"])
        writer.writerow(
            [
                "__mean__",
                f"{report.mean('ingest_filter_sec'):.6f}",
                f"{report.mean('row_count_sec'):.6f}",
            ]
        )


def cmd_extract(args) -> int:
    from PIL import Image

    cfg = _load_cfg(args)
    in_path = Path(args.input)
    if in_path.is_dir():
        images = sorted(
            p for p in in_path.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES and p.is_file()
        )
    else:
        images = [in_path]
    if not images:
        log.error("no images found in %s", in_path)
        return 1
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    ok = failed = 0
    timing_rows = []
    for img_path in images:
        t0 = time.perf_counter()
        try:
            rgb = np.asarray(Image.open(img_path).convert("RGB"))
            pairs = extract_ears(rgb, cfg.extract, source_name=img_path.stem)
        except (OSError, EngineError, ValueError) as exc:
            log.warning("skipping %s: %s", img_path.name, exc)
            failed += 1
            continue
        records = []
        for crop, record in pairs:
            Image.fromarray(crop).save(out_dir / f"{record.ear_id}.png")
            records.append(record)
        write_metadata_sidecar(out_dir / f"{img_path.stem}_meta.json", img_path.name, records)
        ok += 1
        elapsed = time.perf_counter() - t0
        timing_rows.append([img_path.stem, len(records), f"{elapsed:.6f}", f"{elapsed / len(records):.6f}"])
        log.info("%s: %d ears in %.2fs", img_path.name, len(records), elapsed)
    if args.timing and timing_rows:
        with open(args.timing, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["scene", "ears", "extract_sec", "extract_sec_per_ear"])
            writer.writerows(timing_rows)
    if ok == 0:
        return 1
    return 2 if failed else 0


_SPEC_FIELDS = {f.name for f in dc_fields(SyntheticEarSpec)}


def cmd_synth(args) -> int:
    spec_path = Path(args.spec)
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    try:
        lines = spec_path.read_text().splitlines()
    except OSError as exc:
        log.error("cannot read spec file: %s", exc)
        return 1
    for lineno, line in enumerate(lines, start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            log.error("%s:%d: invalid JSON (%s)", spec_path, lineno, exc)
            return 1
        if not isinstance(raw, dict):
            log.error("%s:%d: each line must be a JSON object", spec_path, lineno)
            return 1
        ear_id = str(raw.pop("ear_id", f"synthetic_{len(entries):04d}"))
        unknown = set(raw) - _SPEC_FIELDS
        if unknown:
            log.error("%s:%d: unknown spec keys %s", spec_path, lineno, sorted(unknown))
            return 1
        raw.setdefault("seed", args.seed + len(entries))
        try:
            spec = SyntheticEarSpec(**raw)
            spec.validate()
        except (TypeError, ValueError) as exc:
            log.error("%s:%d: bad spec (%s)", spec_path, lineno, exc)
            return 1
        entries.append((ear_id, spec))
    if not entries:
        log.error("%s: no ear specs found", spec_path)
        return 1
    truth_rows = []
    for ear_id, spec in entries:
        candidates, truth = generate_ear(spec)
        doc = ContractDoc(
            ear_id=ear_id,
            width=truth.width,
            height=truth.height,
            candidates=candidates,
            generator={
                "name": "maizekpr-synth",
                "seed": spec.seed,
                "rows": spec.rows,
                "kernels_per_row": spec.kernels_per_row,
                "jitter_px": spec.jitter_px,
                "immature_tip": spec.immature_tip,
            },
        )
        contract_io.write_contract(out_dir / f"{ear_id}.json", doc)
        truth_rows.append(
            [ear_id, truth.kernels_per_row, truth.immature_tip, truth.mature_per_row]
        )
    truth_path = Path(args.truth) if args.truth else out_dir / "truth.csv"
    with open(truth_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ear_id", "kernels_per_row", "immature_tip", "mature_per_row"])
        writer.writerows(truth_rows)
    log.info("synth: wrote %d contract files to %s", len(entries), out_dir)
    return 0


def cmd_eval(args) -> int:
    with open(args.results, newline="") as fh:
        results = {
            row["ear_id"]: row for row in csv.DictReader(fh) if not row.get("error")
        }
    with open(args.truth, newline="") as fh:
        truth = {row["ear_id"]: row for row in csv.DictReader(fh)}
    shared = sorted(set(results) & set(truth))
    if not shared:
        log.error("no overlapping ear_ids between %s and %s", args.results, args.truth)
        return 1
    pairs = [
        EvalPair(
            ear_id=e,
            predicted=float(results[e]["kpr_mean"]),
            truth=float(truth[e]["mature_per_row"]),
        )
        for e in shared
    ]
    rounded_err = np.array(
        [abs(int(results[e]["kpr_rounded"]) - float(truth[e]["mature_per_row"])) for e in shared]
    )
    metrics = [
        ("n_pairs", f"{len(pairs)}"),
        ("accuracy_ratio_percent", f"{accuracy_ratio(pairs):.6f}"),
        ("mean_abs_error_rounded", f"{rounded_err.mean():.6f}"),
        ("within_one_fraction", f"{float(np.mean(rounded_err <= 1)):.6f}"),
    ]
    try:
        metrics.append(("r_squared_identity", f"{r_squared(pairs):.6f}"))
        metrics.append(("r_squared_regression", f"{r_squared_fit(pairs):.6f}"))
    except EngineError as exc:
        log.warning("r_squared unavailable: %s", exc)
    out_path = Path(args.output)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "value"])
        writer.writerows(metrics)
    if args.histogram:
        values = [int(results[e]["kpr_rounded"]) for e in shared]
        with open(args.histogram, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bin_start", "count"])
            for start, count in histogram(values, args.bin_width):
                writer.writerow([f"{start:g}", count])
    for name, value in metrics:
        log.info("eval: %s = %s", name, value)
    return 0


def cmd_bench(args) -> int:
    cfg = _load_cfg(args)
    files = sorted(Path(args.input).glob("*.json"))
    if not files:
        log.error("no contract files in %s", args.input)
        return 1
    report = TimingReport()
    for path in files:
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            doc = load_contract(path)
            kernels = filter_masks(doc.candidates, cfg.filter)
            report.ingest_filter_sec.append(time.perf_counter() - t0)
            t1 = time.perf_counter()
            three_path_kpr(kernels, doc.height, cfg.graph)
            report.row_count_sec.append(time.perf_counter() - t1)
    print(f"ears timed:          {len(files)} x{args.repeat}")
    print(f"ingest+filter (sec): {report.mean('ingest_filter_sec'):.4f} per ear")
    print(f"row counting (sec):  {report.mean('row_count_sec'):.4f} per ear")
    return 0


def _load_cfg(args) -> RunConfig:
    cfg = load_config(getattr(args, "config", None))
    return apply_overrides(cfg, getattr(args, "set", None))


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="YAML config file")
    parser.add_argument(
        "--set",
        action="append",
        metavar="SECTION.KEY=VALUE",
        help="override one config value (repeatable)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maizekpr",
        description="Kernels-per-row phenotyping over maize ear mask contracts",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="isolate ears from scene images")
    p.add_argument("--input", required=True, help="scene image file or directory")
    p.add_argument("--output", required=True, help="directory for crops and sidecars")
    p.add_argument("--timing", help="optional per-scene timing CSV path")
    _add_common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("count", help="count kernels-per-row over contract files")
    p.add_argument("--input", required=True, help="directory of contract .json files")
    p.add_argument("--output", required=True, help="results CSV path")
    p.add_argument("--timing", help="optional timing CSV path")
    p.add_argument("--parallelism", type=int, help="worker processes (default from config)")
    _add_common(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("synth", help="generate synthetic contract files")
    p.add_argument("--spec", required=True, help="ear spec file, one JSON object per line")
    p.add_argument("--output", required=True, help="directory for contract files")
    p.add_argument("--truth", help="truth CSV path (default <output>/truth.csv)")
    p.add_argument("--seed", type=int, default=0, help="base seed for lines without one")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", help="score results against truth")
    p.add_argument("--results", required=True, help="results CSV from 'count'")
    p.add_argument("--truth", required=True, help="truth CSV from 'synth' or annotation")
    p.add_argument("--output", required=True, help="metrics CSV path")
    p.add_argument("--histogram", help="optional histogram CSV path")
    p.add_argument("--bin-width", type=float, default=1.0)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="per-stage timing over contract files")
    p.add_argument("--input", required=True, help="directory of contract .json files")
    p.add_argument("--repeat", type=int, default=3)
    _add_common(p)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
