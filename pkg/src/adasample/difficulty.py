"""Probe set construction and difficulty estimation.

A probe is a parameter point with its generated datum, fixed once up front.
Per-probe difficulty is the probability the current classifier gets the
probe wrong: a 0/1 indicator in ``hard`` mode, ``1 - p(true class)`` in
``soft`` mode.  Difficulty at an arbitrary point is a kernel-weighted mean
over probes; with the bucket-indicator kernel this collapses to the mean
difficulty of the probes sharing the point's bucket, which is what the
training loop uses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import EmptyBucketError
from .space import BucketPartition, ParamPoint

__all__ = [
    "Probe",
    "ProbeSet",
    "ProbeResult",
    "DifficultyField",
    "BucketIndicatorKernel",
    "InverseDistanceKernel",
    "build_probe_set",
    "probe_difficulties",
    "kernel_difficulty",
    "bucket_difficulties",
]


@dataclass(frozen=True)
class Probe:
    point: ParamPoint
    datum: "Datum"  # noqa: F821 - generators.Datum, kept untyped to avoid a cycle
    bucket: int


class ProbeSet:
    """Fixed probe collection with a per-bucket index."""

    def __init__(self, probes, partition: BucketPartition):
        if not probes:
            raise ValueError("a probe set needs at least one probe")
        self.probes = tuple(probes)
        self.partition = partition
        index = [[] for _ in range(partition.bucket_count)]
        for m, probe in enumerate(self.probes):
            index[probe.bucket].append(m)
        self._by_bucket = tuple(np.array(ix, dtype=int) for ix in index)
        self.features = np.stack([p.datum.features for p in self.probes])
        self.labels = np.array([p.datum.label for p in self.probes], dtype=int)

    def __len__(self) -> int:
        return len(self.probes)

    @property
    def n_buckets(self) -> int:
        return self.partition.bucket_count

    def bucket_indices(self, k: int) -> np.ndarray:
        return self._by_bucket[k]

    def bucket_counts(self) -> np.ndarray:
        return np.array([ix.size for ix in self._by_bucket], dtype=int)


@dataclass(frozen=True)
class ProbeResult:
    """Per-probe difficulties measured after training epoch ``epoch``."""

    difficulties: np.ndarray
    epoch: int

    def __post_init__(self):
        d = np.asarray(self.difficulties, dtype=float)
        if np.any(d < 0) or np.any(d > 1):
            raise ValueError("probe difficulties must lie in [0, 1]")
        object.__setattr__(self, "difficulties", d)


@dataclass(frozen=True)
class DifficultyField:
    """Per-bucket difficulty estimates plus the probe counts behind them."""

    values: np.ndarray
    counts: np.ndarray
    epoch: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if np.any(v < 0) or np.any(v > 1):
            raise ValueError("bucket difficulties must lie in [0, 1]")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "counts", np.asarray(self.counts, dtype=int))


@dataclass(frozen=True)
class BucketIndicatorKernel:
    """Weight 1 for probes in the same bucket as the query point, else 0."""


@dataclass(frozen=True)
class InverseDistanceKernel:
    """Weight 1 / (l2(U, V) + epsilon); categorical coordinates contribute
    0 to the distance when equal, 1 otherwise."""

    epsilon: float = 1e-6

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")


KernelWeight = Union[BucketIndicatorKernel, InverseDistanceKernel]


def build_probe_set(
    partition: BucketPartition, generator, probes_per_bucket: int, rng: np.random.Generator
) -> ProbeSet:
    """Draw ``probes_per_bucket`` points uniformly in every bucket and
    generate each datum once."""
    if probes_per_bucket < 1:
        raise ValueError("probes_per_bucket must be >= 1")
    probes = []
    for k in range(partition.bucket_count):
        for _ in range(probes_per_bucket):
            point = partition.uniform_in_bucket(k, rng)
            try:
                datum = generator.generate(point, rng)
            except Exception as exc:
                raise RuntimeError(f"generator failed in bucket {k}: {exc}") from exc
            probes.append(Probe(point=point, datum=datum, bucket=k))
    return ProbeSet(probes, partition)


def probe_difficulties(
    probe_set: ProbeSet, classifier, mode: str = "hard", epoch: int = 0
) -> ProbeResult:
    """Evaluate the classifier on every probe.

    ``hard``: 1 where the argmax prediction misses the label, else 0.
    ``soft``: 1 minus the normalized score of the true class.
    """
    if mode not in ("hard", "soft"):
        raise ValueError(f"mode must be 'hard' or 'soft', got {mode!r}")
    scores = np.asarray(classifier.predict_proba(probe_set.features))
    if scores.ndim != 2 or scores.shape[0] != len(probe_set):
        raise ValueError(f"classifier returned shape {scores.shape} for {len(probe_set)} probes")
    if int(probe_set.labels.max()) >= scores.shape[1]:
        raise ValueError(
            f"classifier emits {scores.shape[1]} classes, probe labels reach {probe_set.labels.max()}"
        )
    if mode == "hard":
        d = (np.argmax(scores, axis=1) != probe_set.labels).astype(float)
    else:
        d = 1.0 - scores[np.arange(len(probe_set)), probe_set.labels]
    return ProbeResult(difficulties=d, epoch=epoch)


def _mixed_distance(point, other, axes) -> float:
    # l2 over axes; categorical mismatch counts as unit distance
    acc = 0.0
    for ax, a, b in zip(axes, point, other):
        if hasattr(ax, "n_values"):
            acc += 0.0 if a == b else 1.0
        else:
            acc += (float(a) - float(b)) ** 2
    return float(np.sqrt(acc))


def kernel_difficulty(
    point: ParamPoint,
    probe_result: ProbeResult,
    probe_set: ProbeSet,
    weight: KernelWeight,
) -> float:
    """Kernel-weighted mean probe difficulty at ``point``."""
    d = probe_result.difficulties
    if isinstance(weight, BucketIndicatorKernel):
        k = probe_set.partition.bucket_of(point)
        idx = probe_set.bucket_indices(k)
        if idx.size == 0:
            raise EmptyBucketError(k, "no probes in the point's bucket")
        return float(d[idx].mean())
    axes = probe_set.partition.axes
    w = np.array(
        [1.0 / (_mixed_distance(point, p.point, axes) + weight.epsilon) for p in probe_set.probes]
    )
    return float(np.dot(d, w) / w.sum())


def bucket_difficulties(
    probe_result: ProbeResult,
    probe_set: ProbeSet,
    fallback: Union[DifficultyField, float] = 0.5,
) -> DifficultyField:
    """Mean probe difficulty per bucket.

    Buckets containing no probes take the fallback: the previous epoch's
    field, or a constant (0.5 before the first update).
    """
    d = probe_result.difficulties
    if d.size != len(probe_set):
        raise ValueError(f"{d.size} difficulties for {len(probe_set)} probes")
    counts = probe_set.bucket_counts()
    if isinstance(fallback, DifficultyField):
        values = fallback.values.copy()
    else:
        values = np.full(probe_set.n_buckets, float(fallback))
    for k in range(probe_set.n_buckets):
        idx = probe_set.bucket_indices(k)
        if idx.size:
            values[k] = d[idx].mean()
    return DifficultyField(values=values, counts=counts, epoch=probe_result.epoch)
