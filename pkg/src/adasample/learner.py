"""Minimal trainable classifiers: softmax regression and a one-hidden-layer
tanh MLP, trained by plain SGD on cross-entropy with L2 weight decay.

Parameters live in a single flat vector so gradient checks and checkpoints
stay trivial.  The learning rate follows the inv policy
``lr_t = lr0 * (1 + gamma * t) ** (-power)``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DivergenceError

__all__ = ["TrainConfig", "Classifier", "EvalResult", "evaluate"]

CHECKPOINT_MAGIC = b"ADSMPCK1"
_ARCH_CODES = {"softmax": 0, "mlp": 1}


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 0.005
    gamma: float = 1e-4
    power: float = 0.75
    weight_decay: float = 5e-4
    batch_size: int = 76
    real_per_batch: int = 60
    synth_per_batch: int = 16

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError(f"base learning rate must be positive, got {self.lr}")
        if self.weight_decay < 0:
            raise ValueError("weight decay must be non-negative")
        if self.batch_size < 1:
            raise ValueError("batch size must be >= 1")
        if self.real_per_batch < 0 or self.synth_per_batch < 0:
            raise ValueError("per-batch mix counts must be non-negative")
        if self.real_per_batch + self.synth_per_batch != self.batch_size:
            raise ValueError(
                f"mix counts {self.real_per_batch}+{self.synth_per_batch} "
                f"must sum to batch size {self.batch_size}"
            )

    def lr_at(self, t: int) -> float:
        return self.lr * (1.0 + self.gamma * t) ** (-self.power)


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


class Classifier:
    """``hidden = 0`` gives softmax regression, otherwise a tanh MLP."""

    def __init__(self, d_in: int, n_classes: int, hidden: int = 0, init_seed: int = 0):
        if d_in < 1 or n_classes < 2 or hidden < 0:
            raise ValueError("need d_in >= 1, n_classes >= 2, hidden >= 0")
        self.d_in = d_in
        self.n_classes = n_classes
        self.hidden = hidden
        self.init_seed = init_seed
        self.arch = "softmax" if hidden == 0 else "mlp"
        if self.arch == "softmax":
            self._shapes = [(d_in, n_classes), (n_classes,)]
        else:
            self._shapes = [(d_in, hidden), (hidden,), (hidden, n_classes), (n_classes,)]
        self.theta = np.zeros(sum(int(np.prod(s)) for s in self._shapes))
        self._xavier_init(np.random.default_rng(init_seed))

    def _xavier_init(self, rng: np.random.Generator) -> None:
        # Xavier-uniform weights, zero biases
        parts = self._views()
        for w in parts[::2]:
            fan_in, fan_out = w.shape
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            w[...] = rng.uniform(-limit, limit, size=w.shape)
        for b in parts[1::2]:
            b[...] = 0.0

    def _views(self) -> list:
        views = []
        offset = 0
        for shape in self._shapes:
            size = int(np.prod(shape))
            views.append(self.theta[offset : offset + size].reshape(shape))
            offset += size
        return views

    # ---- inference -------------------------------------------------------

    def _logits_and_hidden(self, x: np.ndarray):
        if x.ndim == 1:
            x = x[None, :]
        if x.shape[1] != self.d_in:
            raise ValueError(f"feature length {x.shape[1]} does not match d_in {self.d_in}")
        if self.arch == "softmax":
            w, b = self._views()
            return x @ w + b, None, x
        w1, b1, w2, b2 = self._views()
        a = np.tanh(x @ w1 + b1)
        return a @ w2 + b2, a, x

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        """Normalized class probabilities, one row per input."""
        logits, _, _ = self._logits_and_hidden(np.asarray(x, dtype=float))
        return _softmax(logits)

    def forward(self, features: np.ndarray) -> np.ndarray:
        """Probabilities for a single feature vector."""
        return self.predict_proba(np.asarray(features, dtype=float))[0]

    def predict(self, x: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(x), axis=1)

    # ---- training --------------------------------------------------------

    def loss(self, x: np.ndarray, y: np.ndarray, weight_decay: float = 0.0) -> float:
        """Mean cross-entropy plus 0.5 * weight_decay * ||theta||^2."""
        p = self.predict_proba(x)
        n = p.shape[0]
        ce = -np.mean(np.log(np.maximum(p[np.arange(n), y], 1e-300)))
        return float(ce + 0.5 * weight_decay * float(self.theta @ self.theta))

    def gradient(self, x: np.ndarray, y: np.ndarray, weight_decay: float = 0.0) -> np.ndarray:
        """Analytic gradient of ``loss`` with respect to the flat parameters."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=int)
        logits, a, x2 = self._logits_and_hidden(x)
        n = logits.shape[0]
        delta = _softmax(logits)
        delta[np.arange(n), y] -= 1.0
        delta /= n
        grad = np.empty_like(self.theta)
        if self.arch == "softmax":
            gw = x2.T @ delta
            gb = delta.sum(axis=0)
            parts = [gw, gb]
        else:
            w1, b1, w2, b2 = self._views()
            gw2 = a.T @ delta
            gb2 = delta.sum(axis=0)
            da = (delta @ w2.T) * (1.0 - a * a)
            gw1 = x2.T @ da
            gb1 = da.sum(axis=0)
            parts = [gw1, gb1, gw2, gb2]
        offset = 0
        for part in parts:
            size = part.size
            grad[offset : offset + size] = part.ravel()
            offset += size
        grad += weight_decay * self.theta
        return grad

    def train_step(self, x: np.ndarray, y: np.ndarray, config: TrainConfig, t: int) -> float:
        """One SGD step at iteration ``t``; returns the pre-step loss."""
        if len(y) == 0:
            raise ValueError("training batch must be non-empty")
        loss = self.loss(x, y, config.weight_decay)
        if not np.isfinite(loss):
            raise DivergenceError(t)
        self.theta -= config.lr_at(t) * self.gradient(x, y, config.weight_decay)
        return loss

    # ---- checkpoints -----------------------------------------------------

    def save(self, path, iteration: int = 0) -> None:
        """Versioned little-endian binary checkpoint."""
        header = struct.pack(
            "<8sIIIIIQQ",
            CHECKPOINT_MAGIC,
            1,
            _ARCH_CODES[self.arch],
            self.d_in,
            self.hidden,
            self.n_classes,
            iteration,
            self.theta.size,
        )
        Path(path).write_bytes(header + self.theta.astype("<f8").tobytes())

    @classmethod
    def load(cls, path):
        """Returns ``(classifier, iteration)``."""
        blob = Path(path).read_bytes()
        head = struct.calcsize("<8sIIIIIQQ")
        magic, version, arch, d_in, hidden, n_classes, iteration, n = struct.unpack(
            "<8sIIIIIQQ", blob[:head]
        )
        if magic != CHECKPOINT_MAGIC:
            raise ValueError(f"bad checkpoint magic {magic!r}")
        if version != 1:
            raise ValueError(f"unsupported checkpoint version {version}")
        clf = cls(d_in, n_classes, hidden=hidden)
        theta = np.frombuffer(blob[head : head + 8 * n], dtype="<f8")
        if theta.size != n or theta.size != clf.theta.size:
            raise ValueError("checkpoint parameter count does not match architecture")
        clf.theta = theta.astype(float).copy()
        return clf, int(iteration)


@dataclass(frozen=True)
class EvalResult:
    error: float
    bucket_error: np.ndarray
    bucket_count: np.ndarray


def evaluate(classifier: Classifier, data, n_buckets: int) -> EvalResult:
    """Overall and per-bucket misclassification rates over labeled data.

    Empty buckets get NaN error; counts disambiguate.  Data without sampling
    provenance (bucket -1, e.g. real test images) counts toward the overall
    error only.
    """
    if not data:
        raise ValueError("cannot evaluate on an empty dataset")
    x = np.stack([d.features for d in data])
    y = np.array([d.label for d in data], dtype=int)
    buckets = np.array([d.bucket for d in data], dtype=int)
    wrong = (classifier.predict(x) != y).astype(float)
    tracked = buckets >= 0
    counts = np.bincount(buckets[tracked], minlength=n_buckets)
    sums = np.bincount(buckets[tracked], weights=wrong[tracked], minlength=n_buckets)
    with np.errstate(invalid="ignore"):
        bucket_error = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    return EvalResult(
        error=float(wrong.mean()), bucket_error=bucket_error, bucket_count=counts
    )
