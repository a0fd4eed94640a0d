"""Fuzzy fingerprint classification toolkit.

Builds interpretable class prototypes (top-k ranked features with
rank-derived fuzzy memberships) from labeled vectors, classifies by
min-intersection similarity, and ships evaluation and explanation
tooling around them.
"""

from .core import (
    ClassFingerprint,
    ClassificationResult,
    FingerprintLibrary,
    aggregate_class,
    build_class_fingerprint,
    build_library,
    classify,
    fingerprint_instance,
    fuzzify,
    rank_features,
    similarity,
)
from .errors import ConfigError, DimensionMismatchError, FFPError, ParseError

__version__ = "0.1.0"

__all__ = [
    "ClassFingerprint",
    "ClassificationResult",
    "ConfigError",
    "DimensionMismatchError",
    "FFPError",
    "FingerprintLibrary",
    "ParseError",
    "aggregate_class",
    "build_class_fingerprint",
    "build_library",
    "classify",
    "fingerprint_instance",
    "fuzzify",
    "rank_features",
    "similarity",
    "__version__",
]
