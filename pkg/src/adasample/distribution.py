"""Bucket-level sampling distribution and its boosting-style update.

Each epoch the per-bucket categorical distribution is recomputed from the
fixed volume prior and the current difficulty estimates:

    w_k = alpha * prior_k + (1 - alpha) * prior_k * exp(beta * d_k)
    p_k = w_k / sum_j w_j

The update is always anchored to the prior, never to the previous epoch's
distribution, which keeps single-epoch difficulty spikes from compounding.
With ``alpha = 1`` (or ``beta = 0``) the update degenerates to the prior,
i.e. plain uniform-over-volume sampling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .difficulty import DifficultyField
from .space import BucketPartition, ParamPoint

# exp(beta * d) with d <= 1 stays finite below this bound
MAX_BETA = 700.0

__all__ = ["UpdateParams", "SamplingDistribution", "update_distribution"]


@dataclass(frozen=True)
class UpdateParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 <= self.beta <= MAX_BETA:
            raise ValueError(f"beta must be in [0, {MAX_BETA:g}], got {self.beta}")


@dataclass(frozen=True)
class SamplingDistribution:
    """Immutable categorical distribution over bucket ids."""

    probs: np.ndarray
    epoch: int
    prior: np.ndarray
    _cdf: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size < 1:
            raise ValueError("probs must be a non-empty vector")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("probs must be non-negative and sum to 1")
        object.__setattr__(self, "probs", probs)
        cdf = np.cumsum(probs)
        cdf[-1] = 1.0
        object.__setattr__(self, "_cdf", cdf)

    @property
    def n_buckets(self) -> int:
        return self.probs.size

    def sample_bucket(self, rng: np.random.Generator) -> int:
        """Draw one bucket id by inverse CDF."""
        return int(np.searchsorted(self._cdf, rng.random(), side="right"))

    def sample_params(
        self, partition: BucketPartition, n: int, rng: np.random.Generator
    ) -> list:
        """Two-stage draw of ``n`` points: bucket first, then uniform within it.

        Returns ``[(point, bucket_id), ...]`` with the provenance id recorded
        alongside each point.
        """
        if self.n_buckets != partition.bucket_count:
            raise ValueError(
                f"distribution has {self.n_buckets} buckets, partition {partition.bucket_count}"
            )
        out = []
        for _ in range(n):
            k = self.sample_bucket(rng)
            out.append((partition.uniform_in_bucket(k, rng), k))
        return out


def update_distribution(
    prior: np.ndarray, difficulty: DifficultyField, params: UpdateParams
) -> SamplingDistribution:
    """Reweight the prior toward difficult buckets and normalize."""
    prior = np.asarray(prior, dtype=float)
    if abs(prior.sum() - 1.0) > 1e-9:
        raise ValueError(f"prior must sum to 1, got {prior.sum()!r}")
    d = difficulty.values
    if d.shape != prior.shape:
        raise ValueError(f"difficulty length {d.size} does not match prior length {prior.size}")
    if params.alpha == 1.0:
        # exact degeneracy to the prior, bit for bit
        return SamplingDistribution(probs=prior.copy(), epoch=difficulty.epoch + 1, prior=prior)
    w = params.alpha * prior + (1.0 - params.alpha) * prior * np.exp(params.beta * d)
    return SamplingDistribution(
        probs=w / w.sum(), epoch=difficulty.epoch + 1, prior=prior
    )
