"""Affine image augmentation and the 16-bin magnitude scheme.

Seven transform families over small grayscale images: rotation, horizontal /
vertical scaling, shifting and shearing.  Rotation magnitudes are cut into
four bins, every other family into two (below / above the identity), giving
16 bins; a generated image is touched by exactly one family at one magnitude.

Conventions, fixed so tests can rasterize independently:
  * coordinates are (x=column, y=row), origin at the top-left pixel center;
  * transforms act about the image center ((W-1)/2, (H-1)/2);
  * positive rotation turns the +x axis toward +y (visually clockwise when
    rows grow downward);
  * output pixels are bilinearly sampled from the inverse-mapped source
    location, zero-filled outside the frame, clamped to [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["AugmentationBin", "AffineRanges", "default_bins", "affine_augment"]

KINDS = ("rotate", "h_scale", "v_scale", "h_shift", "v_shift", "h_shear", "v_shear")


@dataclass(frozen=True)
class AugmentationBin:
    """One magnitude bin of one transform family."""

    kind: str
    lo: float
    hi: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown augmentation kind {self.kind!r}")
        if not self.lo < self.hi:
            raise ValueError(f"bin range must satisfy lo < hi, got [{self.lo}, {self.hi}]")

    def magnitude_at(self, u: float) -> float:
        """Map a normalized coordinate u in [0, 1] onto this bin's range."""
        if not 0.0 <= u <= 1.0:
            raise ValueError(f"normalized magnitude must be in [0, 1], got {u}")
        return self.lo + u * (self.hi - self.lo)


@dataclass(frozen=True)
class AffineRanges:
    """Magnitude extents per transform family.

    Rotation is in degrees; scaling is a multiplicative factor split at 1;
    shifts are in pixels and shears are coefficients, both split at 0.
    """

    rotation_max: float = 15.0
    scale_lo: float = 0.85
    scale_hi: float = 1.15
    shift_max: float = 3.0
    shear_max: float = 0.15

    def __post_init__(self):
        if self.rotation_max <= 0 or self.shift_max <= 0 or self.shear_max <= 0:
            raise ValueError("rotation_max, shift_max and shear_max must be positive")
        if not self.scale_lo < 1.0 < self.scale_hi:
            raise ValueError("scale range must straddle 1.0")


def default_bins(ranges: AffineRanges = AffineRanges()) -> tuple:
    """The 16 bins, in the fixed order used by bucket ids.

    Four rotation quarters first, then (low, high) halves of h_scale,
    v_scale, h_shift, v_shift, h_shear, v_shear.
    """
    r = ranges.rotation_max
    bins = [
        AugmentationBin("rotate", -r, -r / 2),
        AugmentationBin("rotate", -r / 2, 0.0),
        AugmentationBin("rotate", 0.0, r / 2),
        AugmentationBin("rotate", r / 2, r),
    ]
    for kind, lo, mid, hi in (
        ("h_scale", ranges.scale_lo, 1.0, ranges.scale_hi),
        ("v_scale", ranges.scale_lo, 1.0, ranges.scale_hi),
        ("h_shift", -ranges.shift_max, 0.0, ranges.shift_max),
        ("v_shift", -ranges.shift_max, 0.0, ranges.shift_max),
        ("h_shear", -ranges.shear_max, 0.0, ranges.shear_max),
        ("v_shear", -ranges.shear_max, 0.0, ranges.shear_max),
    ):
        bins.append(AugmentationBin(kind, lo, mid))
        bins.append(AugmentationBin(kind, mid, hi))
    return tuple(bins)


def transform_matrix(kind: str, magnitude: float) -> tuple:
    """Forward 2x2 linear map plus translation for one transform, about the center."""
    m = float(magnitude)
    if kind == "rotate":
        t = math.radians(m)
        lin = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
        off = np.zeros(2)
    elif kind == "h_scale":
        lin = np.diag([m, 1.0])
        off = np.zeros(2)
    elif kind == "v_scale":
        lin = np.diag([1.0, m])
        off = np.zeros(2)
    elif kind == "h_shift":
        lin = np.eye(2)
        off = np.array([m, 0.0])
    elif kind == "v_shift":
        lin = np.eye(2)
        off = np.array([0.0, m])
    elif kind == "h_shear":
        lin = np.array([[1.0, m], [0.0, 1.0]])
        off = np.zeros(2)
    elif kind == "v_shear":
        lin = np.array([[1.0, 0.0], [m, 1.0]])
        off = np.zeros(2)
    else:
        raise ValueError(f"unknown augmentation kind {kind!r}")
    return lin, off


def affine_augment(image: np.ndarray, abin: AugmentationBin, magnitude: float) -> np.ndarray:
    """Apply one transform at the given magnitude; same shape out, values in [0, 1]."""
    if not abin.lo <= magnitude <= abin.hi:
        raise ValueError(
            f"magnitude {magnitude} outside bin [{abin.lo}, {abin.hi}] of {abin.kind}"
        )
    img = np.asarray(image, dtype=float)
    if img.ndim != 2:
        raise ValueError(f"expected a 2-D grayscale image, got shape {img.shape}")
    h, w = img.shape
    lin, off = transform_matrix(abin.kind, magnitude)
    inv = np.linalg.inv(lin)
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0

    ys, xs = np.mgrid[0:h, 0:w]
    # inverse map: source = inv @ (dest - center - offset) + center
    dx = xs - cx - off[0]
    dy = ys - cy - off[1]
    sx = inv[0, 0] * dx + inv[0, 1] * dy + cx
    sy = inv[1, 0] * dx + inv[1, 1] * dy + cy

    x0 = np.floor(sx).astype(int)
    y0 = np.floor(sy).astype(int)
    fx = sx - x0
    fy = sy - y0

    def sample(yi, xi):
        inside = (yi >= 0) & (yi < h) & (xi >= 0) & (xi < w)
        vals = np.zeros_like(sx)
        vals[inside] = img[yi[inside], xi[inside]]
        return vals

    out = (
        sample(y0, x0) * (1 - fx) * (1 - fy)
        + sample(y0, x0 + 1) * fx * (1 - fy)
        + sample(y0 + 1, x0) * (1 - fx) * fy
        + sample(y0 + 1, x0 + 1) * fx * fy
    )
    return np.clip(out, 0.0, 1.0)
