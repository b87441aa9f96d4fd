"""Difficulty-driven adaptive sampling of synthesized training data.

A trainable classifier and a data sampler improve each other in a closed
per-epoch loop: a fixed probe set measures where the classifier currently
fails, difficulties are aggregated over a bucket partition of the data
parameter space, and the bucket-level sampling distribution is reweighted
toward the hard regions before the next epoch's data is generated.
"""

from .augment import AffineRanges, AugmentationBin, affine_augment, default_bins
from .difficulty import (
    BucketIndicatorKernel,
    DifficultyField,
    InverseDistanceKernel,
    Probe,
    ProbeResult,
    ProbeSet,
    bucket_difficulties,
    build_probe_set,
    kernel_difficulty,
    probe_difficulties,
)
from .distribution import SamplingDistribution, UpdateParams, update_distribution
from .engine import CompareReport, EpochRecord, LoopConfig, RunReport, compare, run
from .errors import (
    ConfigError,
    DataError,
    DivergenceError,
    EmptyBucketError,
    IdxFormatError,
)
from .generators import (
    Datum,
    FixedPool,
    GaussianTask,
    GaussianTaskSpec,
    ImageAugmentTask,
    fixed_pool_snapshot,
)
from .idx import ImagePool, load_idx, load_idx_images, load_idx_labels
from .learner import Classifier, EvalResult, TrainConfig, evaluate
from .metrics import (
    acc_threshold,
    geodesic_distance,
    med_err,
    paired_t_test,
    rotation_from_angles,
)
from .space import (
    BucketPartition,
    CategoricalAxis,
    ContinuousAxis,
    ParameterSpace,
    ParamPoint,
)

__version__ = "0.1.0"
