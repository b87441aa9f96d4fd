"""Run configuration: parsing, validation, defaults and snapshots.

Config files are line-oriented ``key = value`` with dotted section prefixes,
``#`` comment lines and blank lines.  Unknown keys are hard errors so a typo
in a hyperparameter name cannot silently invalidate an experiment.  The
resolved configuration (defaults applied) serializes back to the same format
as the run's ``config.snapshot``; parsing that snapshot reproduces the
RunConfig exactly.

Only the data directory may come from the environment
(``ADASAMPLE_DATA_DIR`` resolves relative image/label paths); every
science-relevant parameter lives in the file.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .augment import AffineRanges
from .engine import MODES, LoopConfig
from .errors import ConfigError, DataError
from .generators import Datum, GaussianTask, GaussianTaskSpec, ImageAugmentTask
from .idx import load_idx
from .learner import TrainConfig

__all__ = ["RunConfig", "parse_config", "parse_config_text"]

DATA_DIR_ENV = "ADASAMPLE_DATA_DIR"


def _parse_int(text: str) -> int:
    return int(text)


def _parse_float(text: str) -> float:
    return float(text)


def _parse_str(text: str) -> str:
    return text


def _parse_int_list(text: str) -> tuple:
    return tuple(int(tok.strip()) for tok in text.split(",") if tok.strip())


def _parse_float_list(text: str) -> tuple:
    return tuple(float(tok.strip()) for tok in text.split(",") if tok.strip())


SCHEMA = {
    "experiment": (_parse_str, None),
    "mode": (_parse_str, "adaptive"),
    "seeds": (_parse_int_list, (0,)),
    "out": (_parse_str, ""),
    "generator": (_parse_str, None),
    "gaussian.classes": (_parse_int, 3),
    "gaussian.sectors": (_parse_int, 4),
    "gaussian.mean_radius": (_parse_float, 1.0),
    "gaussian.ring_gap": (_parse_float, -1.0),
    "gaussian.noise": (_parse_float_list, (0.1,)),
    "gaussian.phase_spread": (_parse_float, 0.3),
    "gaussian.geometry_seed": (_parse_int, 0),
    "gaussian.real_size": (_parse_int, 0),
    "mnist.images": (_parse_str, ""),
    "mnist.labels": (_parse_str, ""),
    "mnist.val_images": (_parse_str, ""),
    "mnist.val_labels": (_parse_str, ""),
    "augment.rotation_max": (_parse_float, 15.0),
    "augment.scale_lo": (_parse_float, 0.85),
    "augment.scale_hi": (_parse_float, 1.15),
    "augment.shift_max": (_parse_float, 3.0),
    "augment.shear_max": (_parse_float, 0.15),
    "update.alpha": (_parse_float, 0.9),
    "update.beta": (_parse_float, 1.0),
    "probe.per_bucket": (_parse_int, 20),
    "probe.mode": (_parse_str, "hard"),
    "train.lr": (_parse_float, 0.005),
    "train.gamma": (_parse_float, 1e-4),
    "train.power": (_parse_float, 0.75),
    "train.weight_decay": (_parse_float, 5e-4),
    "train.batch_size": (_parse_int, None),
    "train.real_per_batch": (_parse_int, None),
    "train.synth_per_batch": (_parse_int, None),
    "train.hidden": (_parse_int, 0),
    "loop.iterations": (_parse_int, 1000),
    "loop.iterations_per_epoch": (_parse_int, 500),
    "loop.warmup": (_parse_int, 0),
    "loop.val_size": (_parse_int, 2000),
    "loop.fixed_pool_size": (_parse_int, 1000),
}


@dataclass(frozen=True, eq=False)
class RunConfig:
    """Fully resolved run configuration.

    ``values`` is the complete resolved key map; the named fields mirror the
    entries the orchestration code touches directly.  Equality compares the
    full key map, which is what the snapshot round-trip guarantees.
    """

    values: dict = field(repr=False)
    experiment: str = ""
    mode: str = "adaptive"
    seeds: tuple = (0,)
    out: str = ""
    generator: str = ""
    alpha: float = 0.9
    beta: float = 1.0
    probe_per_bucket: int = 20
    probe_mode: str = "hard"
    hidden: int = 0
    iterations: int = 1000
    iterations_per_epoch: int = 500
    warmup: int = 0
    val_size: int = 2000
    fixed_pool_size: int = 1000

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self.values == other.values

    @property
    def label(self) -> str:
        return self.experiment

    # ---- construction -----------------------------------------------------

    def make_train_config(self) -> TrainConfig:
        v = self.values
        return TrainConfig(
            lr=v["train.lr"],
            gamma=v["train.gamma"],
            power=v["train.power"],
            weight_decay=v["train.weight_decay"],
            batch_size=v["train.batch_size"],
            real_per_batch=v["train.real_per_batch"],
            synth_per_batch=v["train.synth_per_batch"],
        )

    def make_generator(self):
        """Returns ``(generator, real_pool, val_data)``."""
        v = self.values
        if self.generator == "gaussian":
            noise = v["gaussian.noise"]
            if len(noise) == 1:
                noise = noise * v["gaussian.sectors"]
            gap = v["gaussian.ring_gap"]
            spec = GaussianTaskSpec(
                n_classes=v["gaussian.classes"],
                n_sectors=v["gaussian.sectors"],
                mean_radius=v["gaussian.mean_radius"],
                ring_gap=None if gap < 0 else gap,
                sector_noise=noise,
                phase_spread=v["gaussian.phase_spread"],
                geometry_seed=v["gaussian.geometry_seed"],
            )
            return GaussianTask(spec), None, None
        pool = load_idx(_data_path(v["mnist.images"]), _data_path(v["mnist.labels"]))
        ranges = AffineRanges(
            rotation_max=v["augment.rotation_max"],
            scale_lo=v["augment.scale_lo"],
            scale_hi=v["augment.scale_hi"],
            shift_max=v["augment.shift_max"],
            shear_max=v["augment.shear_max"],
        )
        task = ImageAugmentTask(pool, ranges)
        val_data = None
        if v["mnist.val_images"]:
            val_pool = load_idx(
                _data_path(v["mnist.val_images"]), _data_path(v["mnist.val_labels"])
            )
            val_data = tuple(
                Datum(features=img.ravel(), label=int(lbl), point=(), bucket=-1)
                for img, lbl in zip(val_pool.images, val_pool.labels)
            )
        return task, pool, val_data

    def to_loop(self, seed: int) -> LoopConfig:
        generator, real_pool, val_data = self.make_generator()
        return LoopConfig(
            generator=generator,
            mode=self.mode,
            alpha=self.alpha,
            beta=self.beta,
            total_iterations=self.iterations,
            iterations_per_epoch=self.iterations_per_epoch,
            warmup_iterations=self.warmup,
            probes_per_bucket=self.probe_per_bucket,
            probe_mode=self.probe_mode,
            train=self.make_train_config(),
            hidden=self.hidden,
            seed=seed,
            val_size=self.val_size,
            fixed_pool_size=self.fixed_pool_size,
            real_pool=real_pool,
            real_pool_size=self.values["gaussian.real_size"] if self.generator == "gaussian" else 0,
            val_data=val_data,
        )

    # ---- serialization ------------------------------------------------------

    def snapshot(self) -> str:
        """Resolved config in the same key = value format, plus the derived
        bucket-partition descriptor."""
        lines = [f"{key} = {_format_value(self.values[key])}" for key in SCHEMA]
        generator, _, _ = self.make_generator()
        for name, desc in generator.partition.descriptor_lines():
            lines.append(f"space.{name} = {desc}")
        return "\n".join(lines) + "\n"


def _format_value(value) -> str:
    if isinstance(value, tuple):
        return ",".join(_format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _data_path(text: str) -> Path:
    path = Path(text)
    base = os.environ.get(DATA_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def parse_config_text(text: str, source: str = "<config>", overrides: Optional[dict] = None):
    """Parse config content; ``overrides`` are applied after file keys."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key.startswith("space."):
            continue  # derived partition descriptor, informational
        if key not in SCHEMA:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        raw[key] = (value, lineno)

    if overrides:
        for key, value in overrides.items():
            if key not in SCHEMA:
                raise ConfigError(f"override: unknown key {key!r}")
            raw[key] = (str(value), 0)

    values = {}
    for key, (parser, default) in SCHEMA.items():
        if key in raw:
            text_value, lineno = raw[key]
            try:
                values[key] = parser(text_value)
            except ValueError as exc:
                raise ConfigError(f"{source}:{lineno}: bad value for {key}: {exc}") from exc
        else:
            values[key] = default

    _apply_conditional_defaults(values)
    _validate(values, source)
    return RunConfig(
        values=values,
        experiment=values["experiment"],
        mode=values["mode"],
        seeds=values["seeds"],
        out=values["out"],
        generator=values["generator"],
        alpha=values["update.alpha"],
        beta=values["update.beta"],
        probe_per_bucket=values["probe.per_bucket"],
        probe_mode=values["probe.mode"],
        hidden=values["train.hidden"],
        iterations=values["loop.iterations"],
        iterations_per_epoch=values["loop.iterations_per_epoch"],
        warmup=values["loop.warmup"],
        val_size=values["loop.val_size"],
        fixed_pool_size=values["loop.fixed_pool_size"],
    )


def parse_config(path, overrides: Optional[dict] = None) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return parse_config_text(path.read_text(), source=str(path), overrides=overrides)


def _apply_conditional_defaults(values: dict) -> None:
    # synthetic-only tasks default to a pure generated batch; image tasks mix
    # real and synthesized data
    mixing = values["generator"] == "mnist"
    defaults = (76, 60, 16) if mixing else (16, 0, 16)
    for key, value in zip(
        ("train.batch_size", "train.real_per_batch", "train.synth_per_batch"), defaults
    ):
        if values[key] is None:
            values[key] = value


def _validate(values: dict, source: str) -> None:
    def bad(message: str):
        raise ConfigError(f"{source}: {message}")

    if not values["experiment"]:
        bad("missing required key 'experiment'")
    if values["generator"] not in ("gaussian", "mnist"):
        bad(f"generator must be 'gaussian' or 'mnist', got {values['generator']!r}")
    if values["mode"] not in MODES:
        bad(f"mode must be one of {MODES}, got {values['mode']!r}")
    if not 0.0 <= values["update.alpha"] <= 1.0:
        bad(f"update.alpha must be in [0, 1], got {values['update.alpha']}")
    if not 0.0 <= values["update.beta"] <= 700.0:
        bad(f"update.beta must be in [0, 700], got {values['update.beta']}")
    seeds = values["seeds"]
    if not seeds:
        bad("seeds must be non-empty")
    if len(set(seeds)) != len(seeds):
        bad(f"seeds must be distinct, got {seeds}")
    if values["probe.mode"] not in ("hard", "soft"):
        bad(f"probe.mode must be 'hard' or 'soft', got {values['probe.mode']!r}")
    if values["probe.per_bucket"] < 1:
        bad("probe.per_bucket must be >= 1")
    if values["loop.iterations"] < 1:
        bad("loop.iterations must be >= 1")
    if not 0 <= values["loop.warmup"] <= values["loop.iterations"]:
        bad("loop.warmup must lie within [0, loop.iterations]")
    noise = values["gaussian.noise"]
    if values["generator"] == "gaussian" and len(noise) not in (1, values["gaussian.sectors"]):
        bad(
            f"gaussian.noise needs 1 or {values['gaussian.sectors']} entries, got {len(noise)}"
        )
    if values["generator"] == "mnist":
        for key in ("mnist.images", "mnist.labels"):
            if not values[key]:
                bad(f"generator 'mnist' requires {key}")
            if not _data_path(values[key]).exists():
                raise DataError(f"{source}: {key} path not found: {_data_path(values[key])}")
        if bool(values["mnist.val_images"]) != bool(values["mnist.val_labels"]):
            bad("mnist.val_images and mnist.val_labels must be given together")
    try:
        TrainConfig(
            lr=values["train.lr"],
            gamma=values["train.gamma"],
            power=values["train.power"],
            weight_decay=values["train.weight_decay"],
            batch_size=values["train.batch_size"],
            real_per_batch=values["train.real_per_batch"],
            synth_per_batch=values["train.synth_per_batch"],
        )
    except ValueError as exc:
        bad(str(exc))
    if values["train.hidden"] < 0:
        bad("train.hidden must be >= 0")
