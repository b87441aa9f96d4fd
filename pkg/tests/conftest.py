import math
from pathlib import Path

import numpy as np
import pytest

from adasample.generators import GaussianTask, GaussianTaskSpec
from adasample.idx import ImagePool

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


class ConstantClassifier:
    """Always predicts the same class with full confidence."""

    def __init__(self, n_classes: int, winner: int = 0):
        self.n_classes = n_classes
        self.winner = winner

    def predict_proba(self, x):
        p = np.zeros((len(x), self.n_classes))
        p[:, self.winner] = 1.0
        return p

    def predict(self, x):
        return np.full(len(x), self.winner)


class OracleClassifier:
    """Peeks at a label map to answer perfectly (test stub)."""

    def __init__(self, n_classes: int, labels_for):
        self.n_classes = n_classes
        self._labels_for = labels_for

    def predict_proba(self, x):
        p = np.zeros((len(x), self.n_classes))
        p[np.arange(len(x)), self._labels_for(x)] = 1.0
        return p


class UniformClassifier:
    """Equal score for every class."""

    def __init__(self, n_classes: int):
        self.n_classes = n_classes

    def predict_proba(self, x):
        return np.full((len(x), self.n_classes), 1.0 / self.n_classes)


def make_image_pool(n_classes: int = 10, per_class: int = 3, side: int = 12, seed: int = 9):
    """Deterministic synthetic image pool standing in for real digit data."""
    rng = np.random.default_rng(seed)
    images, labels = [], []
    for c in range(n_classes):
        for _ in range(per_class):
            img = np.zeros((side, side))
            # a blob whose position depends on the class, so classes differ
            r = 2 + c % 3
            cy, cx = 3 + (c * 7) % (side - 6), 3 + (c * 3) % (side - 6)
            yy, xx = np.mgrid[0:side, 0:side]
            img[(yy - cy) ** 2 + (xx - cx) ** 2 <= r * r] = 1.0
            img += 0.05 * rng.random((side, side))
            images.append(np.clip(img, 0.0, 1.0))
            labels.append(c)
    images = np.stack(images)
    labels = np.array(labels)
    by_class = tuple(np.flatnonzero(labels == c) for c in range(n_classes))
    return ImagePool(images=images, labels=labels, by_class=by_class)


def sector_bayes_error_mc(
    task: GaussianTask, sector: int, n: int = 200_000, seed: int = 1234
) -> float:
    """Monte Carlo estimate of the optimal-classifier error inside one angular
    sector, using the true generative model.

    Independent of the library's difficulty machinery: draws (class, angle,
    noise) itself and classifies with the exact per-class likelihoods, which
    for shared isotropic noise reduces to the nearest rotated class mean.
    """
    rng = np.random.default_rng(seed)
    spec = task.spec
    lo = task.angle_axis.bin_edges[sector]
    hi = task.angle_axis.bin_edges[sector + 1]
    cs = rng.integers(spec.n_classes, size=n)
    phis = rng.uniform(lo, hi, size=n)
    sigma = np.array([task.noise_scale(p) for p in phis])
    cos, sin = np.cos(phis), np.sin(phis)
    # rotated class means for every draw: (n, C, 2)
    base = task.class_means  # (C, 2)
    mx = cos[:, None] * base[None, :, 0] - sin[:, None] * base[None, :, 1]
    my = sin[:, None] * base[None, :, 0] + cos[:, None] * base[None, :, 1]
    x = np.stack([mx[np.arange(n), cs], my[np.arange(n), cs]], axis=1)
    x += sigma[:, None] * rng.standard_normal((n, 2))
    d2 = (x[:, 0:1] - mx) ** 2 + (x[:, 1:2] - my) ** 2
    return float(np.mean(np.argmin(d2, axis=1) != cs))


def two_class_overlap_task(noise: float = 0.8, seed: int = 5) -> GaussianTask:
    """Two classes collapsed onto the same mean curve (radius 0)."""
    return GaussianTask(
        GaussianTaskSpec(
            n_classes=2,
            n_sectors=2,
            mean_radius=0.0,
            sector_noise=(noise, noise),
            geometry_seed=seed,
        )
    )
