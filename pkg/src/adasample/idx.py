"""Reader for the big-endian IDX image/label binary format.

Image files: magic 0x00000803, then counts/rows/cols as unsigned 32-bit
big-endian integers, then one unsigned byte per pixel, row-major.  Label
files: magic 0x00000801, then the count, then one byte per label.  Pixels
are scaled to [0, 1] by dividing by 255.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, IdxFormatError

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801

__all__ = ["ImagePool", "load_idx", "load_idx_images", "load_idx_labels"]


@dataclass(frozen=True)
class ImagePool:
    """Fixed-size grayscale images with labels and a per-class index."""

    images: np.ndarray  # (N, H, W) float in [0, 1]
    labels: np.ndarray  # (N,) int
    by_class: tuple  # index arrays, one per class id

    @property
    def n_classes(self) -> int:
        return len(self.by_class)

    def class_indices(self, c: int) -> np.ndarray:
        if not 0 <= c < self.n_classes:
            raise DataError(f"class {c} outside [0, {self.n_classes})")
        return self.by_class[c]

    def select(self, c: int, selector: float) -> np.ndarray:
        """Pick one image of class ``c`` via a uniform selector in [0, 1)."""
        idx = self.class_indices(c)
        if idx.size == 0:
            raise DataError(f"no images of class {c} in the pool")
        i = min(int(selector * idx.size), idx.size - 1)
        return self.images[idx[i]]


def _read_exact(fh, n: int, offset: int, what: str) -> bytes:
    buf = fh.read(n)
    if len(buf) != n:
        raise IdxFormatError(f"truncated {what}: wanted {n} bytes, got {len(buf)}", offset)
    return buf


def load_idx_images(path) -> np.ndarray:
    """Parse an IDX image file into an (N, H, W) float array scaled to [0, 1]."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"image file not found: {path}")
    with open(path, "rb") as fh:
        header = _read_exact(fh, 16, 0, "image header")
        magic, count, rows, cols = struct.unpack(">IIII", header)
        if magic != IMAGE_MAGIC:
            raise IdxFormatError(
                f"bad image magic 0x{magic:08x}, expected 0x{IMAGE_MAGIC:08x}", 0
            )
        payload = _read_exact(fh, count * rows * cols, 16, "image payload")
    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(count, rows, cols)
    return pixels.astype(float) / 255.0


def load_idx_labels(path) -> np.ndarray:
    """Parse an IDX label file into an (N,) int array."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"label file not found: {path}")
    with open(path, "rb") as fh:
        header = _read_exact(fh, 8, 0, "label header")
        magic, count = struct.unpack(">II", header)
        if magic != LABEL_MAGIC:
            raise IdxFormatError(
                f"bad label magic 0x{magic:08x}, expected 0x{LABEL_MAGIC:08x}", 0
            )
        payload = _read_exact(fh, count, 8, "label payload")
    return np.frombuffer(payload, dtype=np.uint8).astype(int)


def load_idx(images_path, labels_path, n_classes: int = 10) -> ImagePool:
    """Load paired image/label files; the counts must agree."""
    images = load_idx_images(images_path)
    labels = load_idx_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise DataError(
            f"count mismatch: {images.shape[0]} images vs {labels.shape[0]} labels"
        )
    if labels.size and labels.max() >= n_classes:
        raise DataError(f"label {labels.max()} outside [0, {n_classes})")
    by_class = tuple(np.flatnonzero(labels == c) for c in range(n_classes))
    return ImagePool(images=images, labels=labels, by_class=by_class)
