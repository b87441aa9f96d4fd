"""Data generators: the map from a parameter point to a labeled datum.

Two concrete tasks are provided.

``GaussianTask`` is a 2-D synthetic classification problem with controllable
per-region difficulty.  Class ``c`` has a frozen base mean of norm
``mean_radius * (c + 1)``; a point ``(c, phi)`` rotates that mean by ``phi``
and adds isotropic Gaussian noise whose scale depends on the angular sector
containing ``phi``.  As ``phi`` sweeps the circle each class mean traces a
ring, so sectors with large noise have genuinely overlapping classes (high
Bayes error) while the rest stay nearly separable.

``ImageAugmentTask`` reproduces a 160-bucket design over a pool of labeled
images: 10 classes x 16 augmentation bins, with two extra continuous axes
(normalized magnitude within the bin and a source-image selector) that each
form a single bin.

``FixedPool`` pre-generates a finite dataset and replays it, for the
ablation that forbids fresh data generation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Protocol

import numpy as np

from .augment import AffineRanges, affine_augment, default_bins
from .errors import DataError, EmptyBucketError
from .idx import ImagePool
from .space import (
    BucketPartition,
    CategoricalAxis,
    ContinuousAxis,
    ParameterSpace,
    ParamPoint,
)

__all__ = [
    "Datum",
    "DataGenerator",
    "GaussianTaskSpec",
    "GaussianTask",
    "ImageAugmentTask",
    "FixedPool",
    "fixed_pool_snapshot",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Datum:
    """One labeled training example with its sampling provenance."""

    features: np.ndarray
    label: int
    point: ParamPoint
    bucket: int


class DataGenerator(Protocol):
    partition: BucketPartition
    feature_dim: int
    n_classes: int

    def generate(self, point: ParamPoint, rng: np.random.Generator) -> Datum: ...


@dataclass(frozen=True)
class GaussianTaskSpec:
    n_classes: int = 3
    n_sectors: int = 4
    mean_radius: float = 1.0
    sector_noise: tuple = (0.1, 0.1, 0.1, 0.1)
    ring_gap: float = None
    phase_spread: float = 0.3
    geometry_seed: int = 0

    def __post_init__(self):
        if self.n_classes < 2:
            raise ValueError("need at least two classes")
        if self.n_sectors < 1:
            raise ValueError("need at least one sector")
        object.__setattr__(self, "sector_noise", tuple(float(s) for s in self.sector_noise))
        if len(self.sector_noise) != self.n_sectors:
            raise ValueError(
                f"{len(self.sector_noise)} noise scales for {self.n_sectors} sectors"
            )
        if any(s < 0 for s in self.sector_noise):
            raise ValueError("noise scales must be non-negative")
        if self.ring_gap is None:
            object.__setattr__(self, "ring_gap", float(self.mean_radius))
        if self.ring_gap < 0:
            raise ValueError("ring_gap must be non-negative")
        if not 0.0 <= self.phase_spread <= TWO_PI:
            raise ValueError("phase_spread must lie in [0, 2*pi]")

    def radii(self) -> np.ndarray:
        """Base mean norms: innermost at mean_radius, spaced by ring_gap."""
        return self.mean_radius + self.ring_gap * np.arange(self.n_classes)


class GaussianTask:
    """2-D ring-structured Gaussian classification with per-sector noise.

    The frozen geometry gives class ``c`` a base mean of norm
    ``mean_radius + c * ring_gap`` at a seed-drawn angular offset within
    ``phase_spread``; keeping the offsets small keeps the classes roughly
    radially stacked, so one sector's noise stays spatially local to that
    sector's angles.
    """

    feature_dim = 2

    def __init__(self, spec: GaussianTaskSpec):
        self.spec = spec
        geom = np.random.default_rng(spec.geometry_seed)
        phases = geom.uniform(0.0, spec.phase_spread, size=spec.n_classes)
        radii = spec.radii()
        self.class_means = np.stack(
            [radii * np.cos(phases), radii * np.sin(phases)], axis=1
        )
        edges = tuple(np.linspace(0.0, TWO_PI, spec.n_sectors + 1))
        self.angle_axis = ContinuousAxis(0.0, TWO_PI, edges, name="angle")
        space = ParameterSpace(
            (CategoricalAxis(spec.n_classes, name="class"), self.angle_axis)
        )
        self.partition = BucketPartition(space)

    @property
    def n_classes(self) -> int:
        return self.spec.n_classes

    def mean_at(self, c: int, phi: float) -> np.ndarray:
        """Class mean rotated to angle ``phi`` (the noise-free feature)."""
        cos, sin = math.cos(phi), math.sin(phi)
        rot = np.array([[cos, -sin], [sin, cos]])
        return rot @ self.class_means[c]

    def noise_scale(self, phi: float) -> float:
        return self.spec.sector_noise[self.angle_axis.bin_of(phi)]

    def generate(self, point: ParamPoint, rng: np.random.Generator) -> Datum:
        c, phi = int(point[0]), float(point[1])
        features = self.mean_at(c, phi) + self.noise_scale(phi) * rng.standard_normal(2)
        return Datum(
            features=features, label=c, point=point, bucket=self.partition.bucket_of(point)
        )


class ImageAugmentTask:
    """Labeled-image task over (class, augmentation bin, magnitude, source).

    The magnitude coordinate is normalized to [0, 1] and mapped onto the
    selected bin's own range; the source coordinate picks one pool image of
    the class uniformly.  Buckets are class x bin only (the two continuous
    axes have a single bin each).
    """

    def __init__(self, pool: ImagePool, ranges: AffineRanges = AffineRanges()):
        self.pool = pool
        self.bins = default_bins(ranges)
        self.image_shape = pool.images.shape[1:]
        self.feature_dim = int(np.prod(self.image_shape))
        space = ParameterSpace(
            (
                CategoricalAxis(pool.n_classes, name="class"),
                CategoricalAxis(len(self.bins), name="bin"),
                ContinuousAxis(0.0, 1.0, (0.0, 1.0), name="magnitude"),
                ContinuousAxis(0.0, 1.0, (0.0, 1.0), name="source"),
            )
        )
        self.partition = BucketPartition(space)

    @property
    def n_classes(self) -> int:
        return self.pool.n_classes

    def generate(self, point: ParamPoint, rng: np.random.Generator) -> Datum:
        c, b, u, s = int(point[0]), int(point[1]), float(point[2]), float(point[3])
        image = self.pool.select(c, s)
        abin = self.bins[b]
        augmented = affine_augment(image, abin, abin.magnitude_at(u))
        return Datum(
            features=augmented.ravel(),
            label=c,
            point=point,
            bucket=self.partition.bucket_of(point),
        )


class FixedPool:
    """Finite pre-generated dataset, indexed by bucket, drawn with replacement.

    When the requested bucket has no members the draw falls back to the
    nearest populated bucket id and the starvation is counted, mirroring the
    duplicated-data regime of sampling from a frozen finite set.
    """

    def __init__(self, data, n_buckets: int):
        if not data:
            raise ValueError("fixed pool must hold at least one datum")
        self.data = tuple(data)
        self.n_buckets = n_buckets
        index = [[] for _ in range(n_buckets)]
        for i, datum in enumerate(self.data):
            index[datum.bucket].append(i)
        self._by_bucket = tuple(np.array(ix, dtype=int) for ix in index)
        self.starved_draws = 0

    def __len__(self) -> int:
        return len(self.data)

    def bucket_counts(self) -> np.ndarray:
        return np.array([ix.size for ix in self._by_bucket], dtype=int)

    def draw_strict(self, k: int, rng: np.random.Generator) -> Datum:
        idx = self._by_bucket[k]
        if idx.size == 0:
            raise EmptyBucketError(k, "no pool members in bucket")
        return self.data[idx[rng.integers(idx.size)]]

    def nearest_populated(self, k: int) -> int:
        counts = self.bucket_counts()
        if counts[k]:
            return k
        populated = np.flatnonzero(counts)
        return int(populated[np.argmin(np.abs(populated - k))])

    def draw(self, k: int, rng: np.random.Generator) -> Datum:
        """Draw from bucket ``k``, falling back to the nearest populated bucket."""
        try:
            return self.draw_strict(k, rng)
        except EmptyBucketError:
            self.starved_draws += 1
            return self.draw_strict(self.nearest_populated(k), rng)


def fixed_pool_snapshot(
    generator: DataGenerator, n: int, rng: np.random.Generator
) -> FixedPool:
    """Pre-generate ``n`` data by uniform two-stage sampling from the volume prior."""
    if n < 1:
        raise ValueError("pool size must be >= 1")
    from .distribution import SamplingDistribution  # local import avoids a cycle

    partition = generator.partition
    prior = partition.volume_prior()
    dist = SamplingDistribution(probs=prior, epoch=0, prior=prior)
    data = [
        generator.generate(point, rng)
        for point, _ in dist.sample_params(partition, n, rng)
    ]
    return FixedPool(data, partition.bucket_count)
