"""Parameter space, bucket partition and within-bucket sampling.

A data point is produced from a parameter vector drawn from a product space
of categorical and continuous axes.  The space is covered by a finite set of
disjoint buckets: the Cartesian product of per-axis bins, flattened row-major
into bucket ids ``0..K-1``.  Continuous bins are half-open ``[e_i, e_{i+1})``
except the last, which is closed at the upper axis bound, so every valid
point maps to exactly one bucket.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

# One coordinate per axis: a category index (int) or a real value.
ParamPoint = tuple

__all__ = [
    "CategoricalAxis",
    "ContinuousAxis",
    "Axis",
    "ParamPoint",
    "ParameterSpace",
    "BucketPartition",
]


@dataclass(frozen=True)
class CategoricalAxis:
    """Finite axis; each category is its own bin."""

    n_values: int
    name: str = ""

    def __post_init__(self):
        if self.n_values < 1:
            raise ValueError(f"axis '{self.name}': n_values must be >= 1, got {self.n_values}")

    @property
    def n_bins(self) -> int:
        return self.n_values

    def bin_of(self, value) -> int:
        v = int(value)
        if v != value or not 0 <= v < self.n_values:
            raise ValueError(
                f"axis '{self.name}': {value!r} is not a category index in [0, {self.n_values})"
            )
        return v

    def sample_in_bin(self, b: int, rng: np.random.Generator):
        return b

    def bin_fraction(self, b: int) -> float:
        return 1.0 / self.n_values

    def descriptor(self) -> str:
        return f"categorical:{self.n_values}"


@dataclass(frozen=True)
class ContinuousAxis:
    """Real interval ``[lo, hi]`` cut into bins by strictly increasing edges.

    ``bin_edges`` must start at ``lo`` and end at ``hi``.
    """

    lo: float
    hi: float
    bin_edges: tuple
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "bin_edges", tuple(float(e) for e in self.bin_edges))
        if not self.lo < self.hi:
            raise ValueError(f"axis '{self.name}': lo must be < hi, got [{self.lo}, {self.hi}]")
        edges = self.bin_edges
        if len(edges) < 2 or edges[0] != self.lo or edges[-1] != self.hi:
            raise ValueError(
                f"axis '{self.name}': bin_edges must begin at lo and end at hi, got {edges}"
            )
        if any(a >= b for a, b in zip(edges, edges[1:])):
            raise ValueError(f"axis '{self.name}': bin_edges must be strictly increasing: {edges}")

    @property
    def n_bins(self) -> int:
        return len(self.bin_edges) - 1

    def bin_of(self, value) -> int:
        v = float(value)
        if not self.lo <= v <= self.hi:
            raise ValueError(f"axis '{self.name}': {v} outside [{self.lo}, {self.hi}]")
        if v == self.hi:  # last bin is closed at the upper bound
            return self.n_bins - 1
        return int(np.searchsorted(self.bin_edges, v, side="right")) - 1

    def sample_in_bin(self, b: int, rng: np.random.Generator) -> float:
        return float(rng.uniform(self.bin_edges[b], self.bin_edges[b + 1]))

    def bin_fraction(self, b: int) -> float:
        return (self.bin_edges[b + 1] - self.bin_edges[b]) / (self.hi - self.lo)

    def descriptor(self) -> str:
        return "continuous:" + ",".join(repr(float(e)) for e in self.bin_edges)


Axis = Union[CategoricalAxis, ContinuousAxis]


def axis_from_descriptor(text: str, name: str = "") -> Axis:
    """Inverse of ``Axis.descriptor()``."""
    kind, _, rest = text.partition(":")
    if kind == "categorical":
        return CategoricalAxis(int(rest), name=name)
    if kind == "continuous":
        edges = tuple(float(tok) for tok in rest.split(","))
        return ContinuousAxis(edges[0], edges[-1], edges, name=name)
    raise ValueError(f"unknown axis descriptor {text!r}")


@dataclass(frozen=True)
class ParameterSpace:
    """Ordered product of axes; the domain points are drawn from."""

    axes: tuple

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        if not self.axes:
            raise ValueError("a parameter space needs at least one axis")

    @property
    def n_axes(self) -> int:
        return len(self.axes)

    def validate_point(self, point: Sequence) -> None:
        if len(point) != self.n_axes:
            raise ValueError(
                f"point has {len(point)} coordinates, space has {self.n_axes} axes"
            )


class BucketPartition:
    """Disjoint cover of a parameter space by per-axis bin products.

    Flat bucket ids enumerate the per-axis bin-index tuples in row-major
    order (last axis fastest), which fixes the id bijection used in all
    serialized output.
    """

    def __init__(self, space: ParameterSpace):
        self.space = space
        self.dims = tuple(ax.n_bins for ax in space.axes)
        self.bucket_count = math.prod(self.dims)
        # row-major strides
        strides = []
        acc = 1
        for n in reversed(self.dims):
            strides.append(acc)
            acc *= n
        self._strides = tuple(reversed(strides))

    @property
    def axes(self) -> tuple:
        return self.space.axes

    def bucket_of(self, point: Sequence) -> int:
        """Return the unique bucket id containing ``point``."""
        self.space.validate_point(point)
        k = 0
        for ax, coord, stride in zip(self.space.axes, point, self._strides):
            k += ax.bin_of(coord) * stride
        return k

    def bins_of(self, k: int) -> tuple:
        """Per-axis bin indices of bucket ``k`` (inverse of the flattening)."""
        self._check_id(k)
        out = []
        for stride, n in zip(self._strides, self.dims):
            out.append((k // stride) % n)
        return tuple(out)

    def uniform_in_bucket(self, k: int, rng: np.random.Generator) -> ParamPoint:
        """Draw a point uniformly inside bucket ``k``."""
        self._check_id(k)
        bins = self.bins_of(k)
        return tuple(ax.sample_in_bin(b, rng) for ax, b in zip(self.space.axes, bins))

    def volume_prior(self) -> np.ndarray:
        """Probability that a uniform draw over the whole space lands in each bucket."""
        per_axis = [
            np.array([ax.bin_fraction(b) for b in range(ax.n_bins)]) for ax in self.space.axes
        ]
        prior = per_axis[0]
        for fr in per_axis[1:]:
            prior = np.outer(prior, fr).ravel()
        return prior / prior.sum()

    def descriptor_lines(self) -> list:
        """Axis descriptors for embedding in the run config snapshot."""
        lines = []
        for i, ax in enumerate(self.space.axes):
            name = ax.name or f"axis{i}"
            lines.append((name, ax.descriptor()))
        return lines

    def _check_id(self, k: int) -> None:
        if not 0 <= k < self.bucket_count:
            raise IndexError(f"bucket id {k} out of range [0, {self.bucket_count})")
