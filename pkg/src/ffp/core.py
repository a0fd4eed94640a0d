"""Fuzzy fingerprint construction, similarity, and classification.

A class fingerprint is a fuzzy set over feature indices: the k most
activated features of the class aggregate, each holding a membership
degree that decreases linearly with its activation rank. Classification
fingerprints the instance the same way and scores it against every class
by the normalized sum of element-wise minimum memberships.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DimensionMismatchError

__all__ = [
    "ClassFingerprint",
    "ClassificationResult",
    "FingerprintLibrary",
    "aggregate_class",
    "as_vector",
    "build_class_fingerprint",
    "build_library",
    "classify",
    "fingerprint_instance",
    "fuzzify",
    "rank_features",
    "similarity",
]


def as_vector(values) -> np.ndarray:
    """Coerce to a finite 1-D float64 array, validating shape and content."""
    vec = np.asarray(values, dtype=np.float64)
    if vec.ndim != 1:
        raise ConfigError(f"feature vector must be 1-D, got shape {vec.shape}")
    if vec.size == 0:
        raise ConfigError("feature vector must have at least one cell")
    if not np.all(np.isfinite(vec)):
        raise ConfigError("feature vector contains NaN or infinite values")
    return vec


def _check_k(k: int) -> int:
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ConfigError(f"fingerprint size k must be a positive integer, got {k!r}")
    return int(k)


def _check_slope(a: float) -> float:
    a = float(a)
    if not 0.0 <= a <= 1.0:
        raise ConfigError(f"slope a must lie in [0, 1], got {a}")
    return a


def _descending_order(values: np.ndarray) -> np.ndarray:
    # Stable sort on the negated values: descending by value, ties broken
    # by ascending feature index.
    return np.argsort(-values, kind="stable")


def aggregate_class(vectors: Iterable) -> np.ndarray:
    """Element-wise sum of the vectors, accumulated in input order.

    The sequential accumulation order pins the floating-point result, so
    identical inputs always aggregate to bit-identical totals.
    """
    total = None
    for v in vectors:
        vec = as_vector(v)
        if total is None:
            total = vec.copy()
        elif vec.size != total.size:
            raise DimensionMismatchError(
                f"mixed vector dimensions in class: {total.size} vs {vec.size}"
            )
        else:
            total += vec
    if total is None:
        raise ConfigError("empty class: no vectors to aggregate")
    return total


def rank_features(v) -> np.ndarray:
    """Rank every feature by value, descending: rank 1 is the largest.

    Ties go to the lower feature index. Returns an int array where
    ``ranks[j]`` is the 1-based rank of feature ``j``; the ranks are a
    permutation of 1..d.
    """
    vec = as_vector(v)
    order = _descending_order(vec)
    ranks = np.empty(vec.size, dtype=np.int64)
    ranks[order] = np.arange(1, vec.size + 1)
    return ranks


def fuzzify(rank: int, k: int, a: float) -> float:
    """Membership degree of a feature at the given rank.

    Linear decay from 1 at rank 1 down to ``1 - a*(k-1)/k`` at rank k;
    always in (0, 1].
    """
    k = _check_k(k)
    a = _check_slope(a)
    if not isinstance(rank, (int, np.integer)) or not 1 <= rank <= k:
        raise ConfigError(f"rank must be an integer in [1, {k}], got {rank!r}")
    return 1.0 - a * (rank - 1) / k


@dataclass(frozen=True)
class ClassFingerprint:
    """A fuzzy set over feature indices representing one class.

    ``entries`` maps feature index to membership degree for the top
    min(k, dim) ranked features; every other feature has implicit
    membership 0.
    """

    label: str
    entries: dict[int, float]
    dim: int
    k: int
    a: float

    def __post_init__(self):
        if self.dim < 1:
            raise ConfigError(f"dim must be positive, got {self.dim}")
        _check_k(self.k)
        _check_slope(self.a)
        expected = min(self.k, self.dim)
        if len(self.entries) != expected:
            raise ConfigError(
                f"fingerprint {self.label!r} must have exactly {expected} entries, "
                f"got {len(self.entries)}"
            )
        for idx, mu in self.entries.items():
            if not 0 <= idx < self.dim:
                raise ConfigError(
                    f"feature index {idx} out of range [0, {self.dim}) in {self.label!r}"
                )
            if not 0.0 < mu <= 1.0:
                raise ConfigError(
                    f"membership {mu} for feature {idx} outside (0, 1] in {self.label!r}"
                )
        ordered = sorted(self.entries.values(), reverse=True)
        if ordered[0] != 1.0:
            raise ConfigError(f"top-ranked membership must be exactly 1, got {ordered[0]}")
        # The membership multiset is fully determined by (k, a, size); for
        # slopes below float resolution adjacent values legitimately collide.
        slope = [fuzzify(rank, self.k, self.a) for rank in range(1, len(ordered) + 1)]
        if ordered != slope:
            raise ConfigError(
                f"memberships of {self.label!r} do not follow the rank slope "
                f"for k={self.k}, a={self.a}"
            )

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self.entries)

    def membership(self, feature: int) -> float:
        return self.entries.get(feature, 0.0)


def _fingerprint_from_aggregate(agg: np.ndarray, label: str, k: int, a: float) -> ClassFingerprint:
    k = _check_k(k)
    a = _check_slope(a)
    top = _descending_order(agg)[: min(k, agg.size)]
    entries = {int(idx): fuzzify(rank, k, a) for rank, idx in enumerate(top, start=1)}
    return ClassFingerprint(label=label, entries=entries, dim=int(agg.size), k=k, a=a)


def build_class_fingerprint(vectors: Iterable, label: str, k: int, a: float) -> ClassFingerprint:
    """Aggregate the class vectors, rank the cells, keep the top k, fuzzify."""
    return _fingerprint_from_aggregate(aggregate_class(vectors), label, k, a)


def fingerprint_instance(v, k: int, a: float, label: str = "instance") -> ClassFingerprint:
    """Fingerprint a single vector; identical to a one-element class build."""
    return _fingerprint_from_aggregate(as_vector(v), label, k, a)


def similarity(phi_a: ClassFingerprint, phi_b: ClassFingerprint, norm: float) -> float:
    """Normalized fuzzy intersection score of two fingerprints.

    Sums min(membership_a, membership_b) over the features present in
    both supports and divides by ``norm``. Summation runs in ascending
    feature-index order, matching a dense loop over all cells bit for bit.
    """
    if phi_a.dim != phi_b.dim:
        raise DimensionMismatchError(
            f"fingerprint dimensions differ: {phi_a.dim} vs {phi_b.dim}"
        )
    norm = float(norm)
    if not norm > 0:
        raise ConfigError(f"norm must be positive, got {norm}")
    total = 0.0
    for idx in sorted(phi_a.entries.keys() & phi_b.entries.keys()):
        total += min(phi_a.entries[idx], phi_b.entries[idx])
    return total / norm


@dataclass(frozen=True)
class FingerprintLibrary:
    """One fingerprint per class plus the parameters they were built with."""

    fingerprints: dict[str, ClassFingerprint]
    class_order: tuple[str, ...]
    dim: int
    k: int
    a: float
    norm: float

    def __post_init__(self):
        object.__setattr__(self, "class_order", tuple(self.class_order))
        if not self.fingerprints:
            raise ConfigError("library must contain at least one fingerprint")
        if len(set(self.class_order)) != len(self.class_order):
            raise ConfigError("class_order contains duplicate labels")
        if set(self.class_order) != set(self.fingerprints):
            raise ConfigError("class_order must cover exactly the fingerprint labels")
        if not float(self.norm) > 0:
            raise ConfigError(f"norm must be positive, got {self.norm}")
        for label, fp in self.fingerprints.items():
            if fp.label != label:
                raise ConfigError(f"fingerprint keyed {label!r} is labeled {fp.label!r}")
            if fp.dim != self.dim:
                raise DimensionMismatchError(
                    f"fingerprint {label!r} has dim {fp.dim}, library declares {self.dim}"
                )
            if (fp.k, fp.a) != (self.k, self.a):
                raise ConfigError(
                    f"fingerprint {label!r} was built with (k={fp.k}, a={fp.a}), "
                    f"library declares (k={self.k}, a={self.a})"
                )

    def __iter__(self):
        return (self.fingerprints[label] for label in self.class_order)


def build_library(
    vectors_by_class: Mapping[str, Iterable],
    k: int,
    a: float = 0.8,
    norm: float | None = None,
    class_order: Sequence[str] | None = None,
) -> FingerprintLibrary:
    """Build one fingerprint per class and assemble the library.

    ``norm`` defaults to k. ``class_order`` defaults to the mapping's
    iteration order.
    """
    order = tuple(class_order) if class_order is not None else tuple(vectors_by_class)
    if set(order) != set(vectors_by_class):
        raise ConfigError("class_order must cover exactly the classes provided")
    fps = {
        label: build_class_fingerprint(vectors_by_class[label], label, k, a)
        for label in order
    }
    dim = next(iter(fps.values())).dim
    return FingerprintLibrary(
        fingerprints=fps,
        class_order=order,
        dim=dim,
        k=_check_k(k),
        a=_check_slope(a),
        norm=float(k) if norm is None else float(norm),
    )


@dataclass(frozen=True)
class ClassificationResult:
    """Per-class similarity scores plus the argmax decision."""

    scores: dict[str, float]
    predicted: str
    tied: bool
    warnings: tuple[str, ...] = field(default=())


def classify(v, lib: FingerprintLibrary, label: str = "instance") -> ClassificationResult:
    """Score a vector against every class fingerprint and pick the argmax.

    Ties resolve to the earliest class in the library's class order and
    are flagged on the result.
    """
    vec = as_vector(v)
    if vec.size != lib.dim:
        raise DimensionMismatchError(
            f"vector has {vec.size} cells, library expects {lib.dim}"
        )
    notes = ()
    if not vec.any():
        notes = ("all-zero feature vector: ranking falls back to feature index order",)
    instance = _fingerprint_from_aggregate(vec, label, lib.k, lib.a)
    scores = {
        cls: similarity(lib.fingerprints[cls], instance, lib.norm)
        for cls in lib.class_order
    }
    best = max(scores.values())
    winners = [cls for cls in lib.class_order if scores[cls] == best]
    return ClassificationResult(
        scores=scores,
        predicted=winners[0],
        tied=len(winners) > 1,
        warnings=notes,
    )
