"""Sequential histogram-mixture density estimation for mixed-type streams.

A fixed family of refining partitions quantizes each observation at every
level; per-level universal coders supply predictive cell probabilities, and
a weighted mixture across levels yields a proper density w.r.t. a
user-chosen reference measure covering atoms, countable supports, and
continuous parts in one framework. The per-symbol log ratio against any
stationary ergodic source in the model class vanishes, which is the whole
point.
"""

from .coder import LevelCoder, kt_conditional, seq_prob_oracle
from .errors import (
    BoundViolationError,
    ConfigError,
    OutOfSupportError,
    ParseError,
    UnsupportedSourceError,
)
from .estimator import MixtureEstimator, default_weights
from .evaluation import (
    CheckpointRecord,
    PinskerResult,
    RunMetrics,
    kl_trajectory,
    median_at,
    pinsker_check,
    prediction_error_trajectory,
)
from .functionals import Functional, cell_indicator, constant, identity
from .ingest import (
    ObservationRecord,
    RunConfig,
    build_estimator,
    build_family,
    build_reference,
    build_source,
    load_config,
    parse_config,
    parse_observations,
    validate_config,
)
from .partition import (
    Cell,
    PartitionFamily,
    Support,
    countable_tail_family,
    dyadic_family,
    mixed_family,
)
from .reference import ReferenceMeasure, adaptive_midpoint, example3_rule
from .sources import (
    SOURCE_KINDS,
    BinaryMarkovEmbedded,
    CountableGeometric,
    MixedAtomIID,
    PiecewiseDensityIID,
    UniformIID,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryMarkovEmbedded",
    "BoundViolationError",
    "Cell",
    "CheckpointRecord",
    "ConfigError",
    "CountableGeometric",
    "Functional",
    "LevelCoder",
    "MixedAtomIID",
    "MixtureEstimator",
    "ObservationRecord",
    "OutOfSupportError",
    "ParseError",
    "PartitionFamily",
    "PiecewiseDensityIID",
    "PinskerResult",
    "ReferenceMeasure",
    "RunConfig",
    "RunMetrics",
    "SOURCE_KINDS",
    "Support",
    "UniformIID",
    "UnsupportedSourceError",
    "adaptive_midpoint",
    "build_estimator",
    "build_family",
    "build_reference",
    "build_source",
    "cell_indicator",
    "constant",
    "countable_tail_family",
    "default_weights",
    "dyadic_family",
    "example3_rule",
    "identity",
    "kl_trajectory",
    "kt_conditional",
    "load_config",
    "median_at",
    "mixed_family",
    "parse_config",
    "parse_observations",
    "pinsker_check",
    "prediction_error_trajectory",
    "seq_prob_oracle",
    "validate_config",
    "__version__",
]
