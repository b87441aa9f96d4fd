"""Post-hoc reporting over a completed run directory.

Produces plot-ready delimited data (``heatmap.csv`` with the bucket axes
unrolled into columns), a plain-text summary table, and rendered figures:
the per-epoch sampling-probability and difficulty grids as heatmaps plus the
loss/error training curves.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .errors import DataError
from .runio import (
    CONFIG_SNAPSHOT,
    DISTRIBUTION_CSV,
    EPOCHS_CSV,
    RUN_FILES,
    atomic_write_text,
    fmt_float,
    read_csv_rows,
)
from .space import axis_from_descriptor

HEATMAP_CSV = "heatmap.csv"
SUMMARY_TXT = "summary.txt"
FIGURES = ("distribution_heatmap.png", "difficulty_heatmap.png", "training_curves.png")

__all__ = ["write_report", "HEATMAP_CSV", "SUMMARY_TXT", "FIGURES"]


def _axes_from_snapshot(text: str) -> list:
    """(name, axis) pairs from the snapshot's space.* descriptor lines."""
    axes = []
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("space.") and "=" in stripped:
            key, _, desc = stripped.partition("=")
            name = key.strip()[len("space.") :]
            axes.append((name, axis_from_descriptor(desc.strip(), name=name)))
    if not axes:
        raise DataError("config.snapshot holds no space.* axis descriptors")
    return axes


def _unravel(k: int, dims) -> tuple:
    out = []
    for n in reversed(dims):
        out.append(k % n)
        k //= n
    return tuple(reversed(out))


def _grid(rows, key: str, epochs, n_buckets: int) -> np.ndarray:
    grid = np.full((len(epochs), n_buckets), np.nan)
    order = {e: i for i, e in enumerate(epochs)}
    for row in rows:
        grid[order[int(row["epoch"])], int(row["bucket"])] = float(row[key])
    return grid


def write_report(run_dir, out_dir=None) -> list:
    """Build all report artifacts from a run directory; returns written paths."""
    run_dir = Path(run_dir)
    missing = [name for name in RUN_FILES if not (run_dir / name).exists()]
    if missing:
        raise DataError(f"incomplete run directory {run_dir}: missing {', '.join(missing)}")
    out = Path(out_dir) if out_dir else run_dir

    axes = _axes_from_snapshot((run_dir / CONFIG_SNAPSHOT).read_text())
    dims = [ax.n_bins for _, ax in axes]
    names = [name for name, _ in axes]

    dist_rows = read_csv_rows(run_dir / DISTRIBUTION_CSV)
    epoch_rows = read_csv_rows(run_dir / EPOCHS_CSV)
    epochs = sorted({int(r["epoch"]) for r in dist_rows})
    n_buckets = int(np.prod(dims))
    seen = max(int(r["bucket"]) for r in dist_rows) + 1
    if seen != n_buckets:
        raise DataError(
            f"distribution.csv covers {seen} buckets but the space descriptor gives {n_buckets}"
        )

    p_grid = _grid(dist_rows, "p", epochs, n_buckets)
    d_grid = _grid(dist_rows, "d", epochs, n_buckets)

    # ---- heatmap.csv: bucket axes unrolled --------------------------------
    header = ["epoch", "bucket", *names, "p", "d"]
    lines = [",".join(header)]
    for ei, epoch in enumerate(epochs):
        for k in range(n_buckets):
            bins = _unravel(k, dims)
            lines.append(
                ",".join(
                    [str(epoch), str(k), *(str(b) for b in bins),
                     fmt_float(p_grid[ei, k]), fmt_float(d_grid[ei, k])]
                )
            )
    heatmap_path = out / HEATMAP_CSV
    atomic_write_text(heatmap_path, "\n".join(lines) + "\n")

    # ---- summary.txt -------------------------------------------------------
    summary = _summary_text(epoch_rows, p_grid, d_grid, epochs, axes, dims)
    summary_path = out / SUMMARY_TXT
    atomic_write_text(summary_path, summary)

    # ---- figures -----------------------------------------------------------
    fig_paths = [out / name for name in FIGURES]
    _heatmap_figure(p_grid, epochs, "sampling probability", fig_paths[0])
    _heatmap_figure(d_grid, epochs, "bucket difficulty", fig_paths[1])
    _curves_figure(epoch_rows, fig_paths[2])

    return [heatmap_path, summary_path, *fig_paths]


def _summary_text(epoch_rows, p_grid, d_grid, epochs, axes, dims) -> str:
    lines = ["epoch      loss  probe_err    val_err"]
    for row in epoch_rows:
        lines.append(
            f"{int(row['epoch']):>5}"
            f"  {float(row['loss']):>8.4f}"
            f"  {float(row['probe_error']):>9.4f}"
            f"  {float(row['val_error']):>9.4f}"
        )
    lines.append("")
    lines.append("final-epoch buckets by sampling probability (top 5):")
    final_p = p_grid[-1]
    final_d = d_grid[-1]
    names = [name for name, _ in axes]
    for k in np.argsort(final_p)[::-1][:5]:
        bins = _unravel(int(k), dims)
        where = ", ".join(f"{n}={b}" for n, b in zip(names, bins))
        lines.append(f"  bucket {int(k):>4} ({where}): p={final_p[k]:.6f} d={final_d[k]:.4f}")
    lines.append("")
    return "\n".join(lines) + "\n"


def _heatmap_figure(grid: np.ndarray, epochs, label: str, path) -> None:
    fig, ax = plt.subplots(figsize=(8, 4.5))
    im = ax.imshow(grid, aspect="auto", origin="lower", cmap="viridis",
                   extent=(-0.5, grid.shape[1] - 0.5, epochs[0] - 0.5, epochs[-1] + 0.5))
    ax.set_xlabel("bucket id")
    ax.set_ylabel("epoch")
    ax.set_title(f"per-epoch {label}")
    fig.colorbar(im, ax=ax, label=label)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _curves_figure(epoch_rows, path) -> None:
    epochs = [int(r["epoch"]) for r in epoch_rows]
    loss = [float(r["loss"]) for r in epoch_rows]
    probe = [float(r["probe_error"]) for r in epoch_rows]
    val = [float(r["val_error"]) for r in epoch_rows]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.plot(epochs, loss, "o-", color="tab:blue")
    ax1.set_xlabel("epoch")
    ax1.set_ylabel("mean training loss")
    ax2.plot(epochs, probe, "s--", color="tab:orange", label="probe error")
    ax2.plot(epochs, val, "o-", color="tab:green", label="validation error")
    ax2.set_xlabel("epoch")
    ax2.set_ylabel("error rate")
    ax2.legend()
    for ax in (ax1, ax2):
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
