"""Shared fixtures: a seven-class emotion fingerprint library with known
supports, two sample utterance fingerprints, and helpers to force a
vector into a chosen feature ranking."""

import numpy as np
import pytest

from ffp.core import ClassFingerprint, FingerprintLibrary, fuzzify

EMOTION_DIM = 768
EMOTION_K = 7
EMOTION_A = 0.8
EMOTION_NORM = 7.0

EMOTION_ORDER = (
    "Neutral",
    "Anger",
    "Disgust",
    "Fear",
    "Happiness",
    "Sadness",
    "Surprise",
)

# Feature indices per class, listed in rank order (rank 1 first).
EMOTION_SUPPORTS = {
    "Neutral": (217, 644, 541, 718, 401, 330, 426),
    "Anger": (8, 679, 204, 292, 651, 573, 111),
    "Disgust": (588, 573, 27, 154, 331, 67, 561),
    "Fear": (588, 313, 655, 406, 736, 349, 624),
    "Happiness": (588, 585, 388, 600, 767, 319, 741),
    "Sadness": (371, 588, 5, 156, 4, 93, 550),
    "Surprise": (691, 588, 97, 573, 530, 535, 654),
}

SAMPLE_SUPPORTS = {
    "sample-1": (8, 679, 309, 624, 292, 76, 134),
    "sample-2": (330, 644, 541, 217, 114, 426, 211),
}


def fingerprint_from_ranking(label, ranked_features, dim=EMOTION_DIM, k=EMOTION_K, a=EMOTION_A):
    """Fingerprint whose rank order is exactly the given feature list."""
    entries = {
        int(feat): fuzzify(rank, k, a)
        for rank, feat in enumerate(ranked_features, start=1)
    }
    return ClassFingerprint(label=label, entries=entries, dim=dim, k=k, a=a)


def vector_with_ranking(ranked_features, dim=EMOTION_DIM):
    """Vector whose top cells, in rank order, are the given features."""
    v = np.zeros(dim)
    for pos, feat in enumerate(ranked_features):
        v[feat] = float(len(ranked_features) - pos)
    return v


def build_emotion_library():
    fps = {
        label: fingerprint_from_ranking(label, EMOTION_SUPPORTS[label])
        for label in EMOTION_ORDER
    }
    return FingerprintLibrary(
        fingerprints=fps,
        class_order=EMOTION_ORDER,
        dim=EMOTION_DIM,
        k=EMOTION_K,
        a=EMOTION_A,
        norm=EMOTION_NORM,
    )


@pytest.fixture
def emotion_library():
    return build_emotion_library()


@pytest.fixture
def sample_fingerprints():
    return {
        label: fingerprint_from_ranking(label, feats)
        for label, feats in SAMPLE_SUPPORTS.items()
    }
