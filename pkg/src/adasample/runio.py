"""Persistence of run outputs.

All files are written atomically (temp file + rename) with ``\\n`` newlines
and locale-independent ``.`` decimals, so a rerun with the same config and
seed reproduces every output byte for byte.  Because of that contract the
``wall_ms`` column of ``epochs.csv`` holds a constant 0; measured epoch
timings live only on the in-memory records and the run's stdout summary.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .engine import CompareReport, RunReport
from .errors import DataError

EPOCHS_CSV = "epochs.csv"
DISTRIBUTION_CSV = "distribution.csv"
CONFIG_SNAPSHOT = "config.snapshot"
REPORT_JSON = "report.json"

RUN_FILES = (EPOCHS_CSV, DISTRIBUTION_CSV, CONFIG_SNAPSHOT, REPORT_JSON)

__all__ = [
    "EPOCHS_CSV",
    "DISTRIBUTION_CSV",
    "CONFIG_SNAPSHOT",
    "REPORT_JSON",
    "RUN_FILES",
    "atomic_write_text",
    "fmt_float",
    "persist_run",
    "read_csv_rows",
]


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fmt_float(x) -> str:
    """Shortest round-trip decimal form; 'nan' for missing values."""
    return repr(float(x))


def _csv_text(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"


def persist_run(report: RunReport, snapshot: str, out_dir) -> list:
    """Write the full output-file set for one run; returns the paths."""
    out = Path(out_dir)
    epochs_rows = [
        (str(r.epoch), fmt_float(r.mean_loss), fmt_float(r.probe_error), fmt_float(r.val_error), "0")
        for r in report.records
    ]
    dist_rows = []
    for r in report.records:
        for k in range(report.bucket_count):
            dist_rows.append(
                (str(r.epoch), str(k), fmt_float(r.probs[k]), fmt_float(r.difficulty[k]))
            )
    summary = {
        "mode": report.mode,
        "seed": report.seed,
        "bucket_count": report.bucket_count,
        "epochs": len(report.records),
        "total_iterations": report.total_iterations,
        "final_val_error": report.final_val_error,
        "final_probe_error": report.records[-1].probe_error,
        "final_mean_loss": report.records[-1].mean_loss,
        "starved_draws": report.starved_draws,
    }
    paths = []
    for name, text in (
        (EPOCHS_CSV, _csv_text(("epoch", "loss", "probe_error", "val_error", "wall_ms"), epochs_rows)),
        (DISTRIBUTION_CSV, _csv_text(("epoch", "bucket", "p", "d"), dist_rows)),
        (CONFIG_SNAPSHOT, snapshot),
        (REPORT_JSON, json.dumps(summary, sort_keys=True, indent=2) + "\n"),
    ):
        path = out / name
        atomic_write_text(path, text)
        paths.append(path)
    return paths


def persist_compare(report: CompareReport, out_dir) -> list:
    """Write compare.csv and compare_summary.json."""
    out = Path(out_dir)
    rows = []
    for label in report.labels:
        for seed, err in zip(report.seeds, report.errors[label]):
            rows.append((label, str(seed), fmt_float(err) if err is not None else "failed"))
    summary = {
        "seeds": list(report.seeds),
        "means": report.means,
        "stds": report.stds,
        "pairwise": list(report.pairwise),
        "failures": [list(f) for f in report.failures],
    }
    paths = [out / "compare.csv", out / "compare_summary.json"]
    atomic_write_text(paths[0], _csv_text(("config", "seed", "final_error"), rows))
    atomic_write_text(paths[1], json.dumps(summary, sort_keys=True, indent=2) + "\n")
    return paths


def read_csv_rows(path) -> list:
    """Read a CSV written by this package back into a list of dicts."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"missing run file: {path}")
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
