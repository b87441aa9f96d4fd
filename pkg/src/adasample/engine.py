"""The closed training loop between classifier and sampler.

Each epoch: evaluate the probe set against the current parameters (skipped
during warmup), collapse per-probe difficulties to per-bucket means, rebuild
the sampling distribution from the volume prior, draw fresh training data by
two-stage sampling, and run SGD for the epoch's iterations.

Modes
  adaptive            the full loop
  uniform-baseline    alpha forced to 1: the update degenerates to the prior
  frozen-distribution difficulty is measured but the distribution never moves
  fixed-pool          distribution adapts, but data comes from a finite
                      pre-generated pool instead of fresh generation

Reproducibility: the master seed is split into independent named streams
(init, sampler, noise, probes, val, real), so two runs with the same config
and seed produce identical parameter trajectories, and ablations under one
seed share their initial conditions.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

import numpy as np

from .difficulty import ProbeSet, bucket_difficulties, build_probe_set, probe_difficulties
from .distribution import SamplingDistribution, UpdateParams, update_distribution
from .errors import DivergenceError
from .generators import DataGenerator, Datum, FixedPool, fixed_pool_snapshot
from .idx import ImagePool
from .learner import Classifier, TrainConfig, evaluate
from .metrics import paired_t_test

MODES = ("adaptive", "uniform-baseline", "frozen-distribution", "fixed-pool")
STREAM_NAMES = ("init", "sampler", "noise", "probes", "val", "real")

__all__ = ["ArrayPool", "LoopConfig", "EpochRecord", "RunReport", "CompareReport", "run", "compare"]


def derive_streams(master_seed: int) -> dict:
    """Independent named rng streams deterministically split from one seed."""
    children = np.random.SeedSequence(master_seed).spawn(len(STREAM_NAMES))
    return {name: np.random.default_rng(c) for name, c in zip(STREAM_NAMES, children)}


@dataclass(frozen=True)
class ArrayPool:
    """Fixed labeled feature matrix serving as the finite real training set."""

    features: np.ndarray
    labels: np.ndarray


@dataclass(frozen=True)
class LoopConfig:
    generator: DataGenerator
    mode: str = "adaptive"
    alpha: float = 0.9
    beta: float = 1.0
    total_iterations: int = 1000
    iterations_per_epoch: int = 500
    warmup_iterations: int = 0
    probes_per_bucket: int = 20
    probe_mode: str = "hard"
    train: TrainConfig = dc_field(default_factory=TrainConfig)
    hidden: int = 0
    seed: int = 0
    val_size: int = 2000
    fixed_pool_size: int = 1000
    real_pool: Optional[ImagePool] = None
    real_pool_size: int = 0  # > 0: draw a fixed uniform "real" set per run
    val_data: Optional[tuple] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.iterations_per_epoch < 1:
            raise ValueError("iterations_per_epoch must be >= 1")
        if not 0 <= self.warmup_iterations <= self.total_iterations:
            raise ValueError("warmup must lie within [0, total_iterations]")
        if self.train.real_per_batch > 0 and self.real_pool is None and self.real_pool_size == 0:
            raise ValueError("real_per_batch > 0 requires a real data pool")
        UpdateParams(self.alpha, self.beta)  # range checks


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    probs: np.ndarray
    difficulty: np.ndarray  # NaN during warmup, before the first probe pass
    mean_loss: float
    probe_error: float
    val_error: float
    wall_ms: float


@dataclass(frozen=True)
class RunReport:
    records: tuple
    classifier: Classifier
    prior: np.ndarray
    bucket_count: int
    mode: str
    seed: int
    total_iterations: int
    starved_draws: int = 0

    @property
    def final_val_error(self) -> float:
        return self.records[-1].val_error


def _uniform_validation_set(generator, n: int, rng: np.random.Generator) -> tuple:
    partition = generator.partition
    prior = partition.volume_prior()
    dist = SamplingDistribution(probs=prior, epoch=0, prior=prior)
    return tuple(
        generator.generate(point, rng) for point, _ in dist.sample_params(partition, n, rng)
    )


def _real_batch(pool, n: int, rng: np.random.Generator):
    idx = rng.integers(len(pool.labels), size=n)
    if isinstance(pool, ArrayPool):
        x = pool.features[idx]
    else:
        x = pool.images[idx].reshape(n, -1)
    return x, pool.labels[idx]


def run(config: LoopConfig) -> RunReport:
    """Execute the loop; raises DivergenceError (with partial records attached)
    if training produces a non-finite loss."""
    streams = derive_streams(config.seed)
    gen = config.generator
    partition = gen.partition
    prior = partition.volume_prior()
    params = UpdateParams(
        1.0 if config.mode == "uniform-baseline" else config.alpha, config.beta
    )

    probe_set = build_probe_set(
        partition, gen, config.probes_per_bucket, streams["probes"]
    )
    classifier = Classifier(
        gen.feature_dim, gen.n_classes, hidden=config.hidden, init_seed=streams["init"]
    )
    val_data = config.val_data
    if val_data is None:
        val_data = _uniform_validation_set(gen, config.val_size, streams["val"])

    real_pool = config.real_pool
    if real_pool is None and config.real_pool_size > 0:
        fixed = _uniform_validation_set(gen, config.real_pool_size, streams["real"])
        real_pool = ArrayPool(
            features=np.stack([d.features for d in fixed]),
            labels=np.array([d.label for d in fixed], dtype=int),
        )

    pool: Optional[FixedPool] = None
    if config.mode == "fixed-pool":
        pool = fixed_pool_snapshot(gen, config.fixed_pool_size, streams["sampler"])

    dist = SamplingDistribution(probs=prior, epoch=0, prior=prior)
    diff_field = None
    records = []
    nan_field = np.full(partition.bucket_count, np.nan)
    done = 0
    epoch = 0
    global_t = 0
    spb = config.train.synth_per_batch

    while done < config.total_iterations:
        epoch += 1
        tick = time.perf_counter()
        n_iters = min(config.iterations_per_epoch, config.total_iterations - done)

        if done < config.warmup_iterations:
            probe_error = float("nan")
        else:
            result = probe_difficulties(probe_set, classifier, config.probe_mode, epoch - 1)
            fallback = diff_field if diff_field is not None else 0.5
            diff_field = bucket_difficulties(result, probe_set, fallback)
            probe_error = float(result.difficulties.mean())
            if config.mode != "frozen-distribution":
                dist = update_distribution(prior, diff_field, params)

        n_synth = n_iters * spb
        if pool is not None:
            synth = [
                pool.draw(dist.sample_bucket(streams["sampler"]), streams["sampler"])
                for _ in range(n_synth)
            ]
        else:
            synth = [
                gen.generate(point, streams["noise"])
                for point, _ in dist.sample_params(partition, n_synth, streams["sampler"])
            ]

        losses = []
        try:
            for i in range(n_iters):
                batch = synth[i * spb : (i + 1) * spb]
                x = np.stack([d.features for d in batch]) if batch else np.empty((0, gen.feature_dim))
                y = np.array([d.label for d in batch], dtype=int)
                if config.train.real_per_batch:
                    rx, ry = _real_batch(real_pool, config.train.real_per_batch, streams["real"])
                    x = np.vstack([rx, x]) if len(y) else rx
                    y = np.concatenate([ry, y])
                losses.append(classifier.train_step(x, y, config.train, global_t))
                global_t += 1
        except DivergenceError as exc:
            exc.records = tuple(records)
            raise

        done += n_iters
        val = evaluate(classifier, val_data, partition.bucket_count)
        records.append(
            EpochRecord(
                epoch=epoch,
                probs=dist.probs.copy(),
                difficulty=diff_field.values.copy() if diff_field is not None else nan_field.copy(),
                mean_loss=float(np.mean(losses)),
                probe_error=probe_error,
                val_error=val.error,
                wall_ms=(time.perf_counter() - tick) * 1000.0,
            )
        )

    return RunReport(
        records=tuple(records),
        classifier=classifier,
        prior=prior,
        bucket_count=partition.bucket_count,
        mode=config.mode,
        seed=config.seed,
        total_iterations=config.total_iterations,
        starved_draws=pool.starved_draws if pool is not None else 0,
    )


@dataclass(frozen=True)
class CompareReport:
    labels: tuple
    seeds: tuple
    errors: dict  # label -> tuple of final errors, None where the run failed
    failures: tuple  # (label, seed, message)
    means: dict
    stds: dict
    pairwise: tuple  # dicts with a, b, t, p, n or degenerate flag


def compare(configs: Sequence, seeds: Sequence[int]) -> CompareReport:
    """Run every config on every seed and compare final validation errors.

    ``configs`` supply ``label`` and ``to_loop(seed) -> LoopConfig``.  A pair
    enters the t-test only when both configs finished all seeds.
    """
    if len(configs) < 2:
        raise ValueError("compare needs at least two configs")
    if len(seeds) < 2:
        raise ValueError("compare needs at least two seeds")
    if len(set(seeds)) != len(seeds):
        raise ValueError("seeds must be distinct")

    labels = tuple(c.label for c in configs)
    if len(set(labels)) != len(labels):
        labels = tuple(f"{c.label}#{i}" for i, c in enumerate(configs))
    errors: dict = {label: [] for label in labels}
    failures = []
    for label, cfg in zip(labels, configs):
        for seed in seeds:
            try:
                errors[label].append(run(cfg.to_loop(seed)).final_val_error)
            except Exception as exc:  # record and continue with other cells
                errors[label].append(None)
                failures.append((label, seed, str(exc)))

    means, stds = {}, {}
    for label in labels:
        ok = [e for e in errors[label] if e is not None]
        means[label] = float(np.mean(ok)) if ok else float("nan")
        stds[label] = float(np.std(ok, ddof=1)) if len(ok) > 1 else float("nan")

    pairwise = []
    for i in range(len(labels)):
        for j in range(i + 1, len(labels)):
            a, b = labels[i], labels[j]
            cell: dict = {"a": a, "b": b, "n": len(seeds)}
            xs, ys = errors[a], errors[b]
            if any(e is None for e in xs) or any(e is None for e in ys):
                cell["skipped"] = "incomplete runs"
            else:
                try:
                    t, p, n = paired_t_test(xs, ys)
                    cell.update(t=t, p=p, n=n)
                except ZeroDivisionError:
                    cell["degenerate"] = "zero-variance differences"
            pairwise.append(cell)

    return CompareReport(
        labels=labels,
        seeds=tuple(seeds),
        errors={k: tuple(v) for k, v in errors.items()},
        failures=tuple(failures),
        means=means,
        stds=stds,
        pairwise=tuple(pairwise),
    )
