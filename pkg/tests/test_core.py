"""Fingerprint construction, similarity, and classification."""

import numpy as np
import pytest

from conftest import (
    EMOTION_SUPPORTS,
    SAMPLE_SUPPORTS,
    fingerprint_from_ranking,
    vector_with_ranking,
)
from ffp.core import (
    ClassFingerprint,
    aggregate_class,
    build_class_fingerprint,
    build_library,
    classify,
    fingerprint_instance,
    fuzzify,
    rank_features,
    similarity,
)
from ffp.errors import ConfigError, DimensionMismatchError


class TestAggregate:
    def test_elementwise_sum(self):
        out = aggregate_class([[1, 2], [3, 4]])
        np.testing.assert_array_equal(out, [4, 6])

    def test_single_vector_is_its_own_aggregate(self):
        np.testing.assert_array_equal(aggregate_class([[0, 0, 0]]), [0, 0, 0])

    def test_matches_column_sum_oracle_bitwise(self):
        rng = np.random.default_rng(0)
        vectors = [rng.normal(size=8) for _ in range(100)]
        out = aggregate_class(vectors)
        # Brute-force per-column sequential sums, fully independent path.
        oracle = np.array(
            [sum((float(v[col]) for v in vectors), start=0.0) for col in range(8)]
        )
        assert out.tolist() == oracle.tolist()

    def test_empty_class_rejected(self):
        with pytest.raises(ConfigError, match="empty class"):
            aggregate_class([])

    def test_mixed_dims_rejected(self):
        with pytest.raises(DimensionMismatchError):
            aggregate_class([[1, 2], [1, 2, 3]])


class TestRankFeatures:
    def test_direct_ordering(self):
        assert rank_features([0.5, 2.0, -1.0]).tolist() == [2, 1, 3]

    def test_ties_break_by_ascending_index(self):
        assert rank_features([7, 7, 7]).tolist() == [1, 2, 3]

    def test_matches_sort_oracle(self):
        rng = np.random.default_rng(1)
        v = rng.normal(size=50)
        order = sorted(range(50), key=lambda i: (-v[i], i))
        oracle = [0] * 50
        for rank, idx in enumerate(order, start=1):
            oracle[idx] = rank
        assert rank_features(v).tolist() == oracle

    def test_is_permutation(self):
        ranks = rank_features([3, 3, 1, 9])
        assert sorted(ranks.tolist()) == [1, 2, 3, 4]

    def test_nan_rejected(self):
        with pytest.raises(ConfigError):
            rank_features([1.0, float("nan")])


class TestFuzzify:
    def test_rank_one_is_exactly_one(self):
        assert fuzzify(1, 7, 0.8) == 1.0

    def test_third_rank_displays_077(self):
        mu = fuzzify(3, 7, 0.8)
        assert mu == pytest.approx(0.7714285714285714)
        assert format(round(mu, 2), "g") == "0.77"

    def test_last_rank_full_slope(self):
        assert fuzzify(4, 4, 1.0) == 0.25

    @pytest.mark.parametrize("rank", [0, 8, -1])
    def test_rank_outside_domain_rejected(self, rank):
        with pytest.raises(ConfigError):
            fuzzify(rank, 7, 0.8)

    def test_slope_outside_unit_interval_rejected(self):
        with pytest.raises(ConfigError):
            fuzzify(1, 7, 1.5)


class TestBuildFingerprint:
    def test_top_two_of_three(self):
        fp = build_class_fingerprint([[9, 1, 5]], "x", k=2, a=1.0)
        assert fp.entries == {0: 1.0, 2: 0.5}

    def test_k_beyond_dim_truncates(self):
        fp = build_class_fingerprint([[3, 1, 2], [1, 1, 1]], "x", k=10, a=0.8)
        assert len(fp.entries) == 3
        assert min(fp.entries.values()) == 1 - 0.8 * 2 / 10

    def test_top_indices_match_partial_sort_oracle(self):
        rng = np.random.default_rng(2)
        vectors = [rng.normal(size=20) for _ in range(40)]
        fp = build_class_fingerprint(vectors, "x", k=5, a=0.8)
        sums = np.zeros(20)
        for v in vectors:
            sums += v
        oracle_top = set(sorted(range(20), key=lambda i: (-sums[i], i))[:5])
        assert fp.support == oracle_top

    def test_instance_equals_singleton_class(self):
        rng = np.random.default_rng(3)
        v = rng.normal(size=12)
        assert fingerprint_instance(v, k=4, a=0.8) == build_class_fingerprint(
            [v], "instance", k=4, a=0.8
        )

    def test_instance_formula(self):
        fp = fingerprint_instance([3, 1, 2], k=3, a=1.0)
        assert fp.entries == {
            0: 1.0,
            2: pytest.approx(2 / 3),
            1: pytest.approx(1 / 3),
        }

    def test_one_hot_k1(self):
        v = np.zeros(16)
        v[5] = 1.0
        assert fingerprint_instance(v, k=1, a=0.8).entries == {5: 1.0}

    def test_zero_slope_makes_crisp_set(self):
        fp = fingerprint_instance([4, 3, 2, 1], k=3, a=0.0)
        assert set(fp.entries.values()) == {1.0}


class TestFingerprintInvariants:
    def test_entries_must_be_exactly_min_k_dim(self):
        with pytest.raises(ConfigError):
            ClassFingerprint(label="x", entries={0: 1.0}, dim=4, k=2, a=0.8)

    def test_rank_one_membership_must_be_one(self):
        with pytest.raises(ConfigError):
            ClassFingerprint(label="x", entries={0: 0.9, 1: 0.5}, dim=4, k=2, a=0.8)

    def test_feature_outside_dim_rejected(self):
        with pytest.raises(ConfigError):
            ClassFingerprint(label="x", entries={0: 1.0, 9: 0.6}, dim=4, k=2, a=0.8)


class TestSimilarity:
    def test_anger_example(self, emotion_library, sample_fingerprints):
        score = similarity(
            sample_fingerprints["sample-1"],
            emotion_library.fingerprints["Anger"],
            norm=7,
        )
        assert 0.345 <= score <= 0.350
        assert score == pytest.approx(2.4285714285714284 / 7)

    def test_neutral_example(self, emotion_library, sample_fingerprints):
        score = similarity(
            sample_fingerprints["sample-2"],
            emotion_library.fingerprints["Neutral"],
            norm=7,
        )
        assert 0.434 <= score <= 0.440

    def test_disjoint_supports_score_zero(self, emotion_library, sample_fingerprints):
        score = similarity(
            sample_fingerprints["sample-2"],
            emotion_library.fingerprints["Anger"],
            norm=7,
        )
        assert score == 0.0

    def test_self_similarity_closed_form(self):
        fp = fingerprint_from_ranking("x", (3, 1, 4, 0, 2), dim=10, k=5, a=0.8)
        assert similarity(fp, fp, norm=5) == pytest.approx(
            (5 - 0.8 * 4 / 2) / 5, abs=1e-12
        )

    def test_emotion_self_similarity(self, emotion_library):
        fp = emotion_library.fingerprints["Neutral"]
        assert similarity(fp, fp, norm=7) == pytest.approx((7 - 0.8 * 6 / 2) / 7)

    def test_symmetry(self, emotion_library, sample_fingerprints):
        a = sample_fingerprints["sample-1"]
        b = emotion_library.fingerprints["Fear"]
        assert similarity(a, b, 7) == similarity(b, a, 7)

    def test_norm_must_be_positive(self, sample_fingerprints):
        fp = sample_fingerprints["sample-1"]
        with pytest.raises(ConfigError):
            similarity(fp, fp, 0)

    def test_dim_mismatch_rejected(self, sample_fingerprints):
        small = fingerprint_from_ranking("x", (0, 1), dim=4, k=2)
        with pytest.raises(DimensionMismatchError):
            similarity(sample_fingerprints["sample-1"], small, 7)


class TestClassify:
    def test_separable_blocks(self):
        by_class = {
            "c0": [[5.0, 4.0, 0, 0, 0, 0]],
            "c1": [[0, 0, 5.0, 4.0, 0, 0]],
            "c2": [[0, 0, 0, 0, 5.0, 4.0]],
        }
        lib = build_library(by_class, k=2, a=0.8)
        result = classify([0.1, 0, 9.0, 7.0, 0, 0.2], lib)
        assert result.predicted == "c1"
        assert not result.tied
        assert result.scores["c1"] > max(result.scores["c0"], result.scores["c2"])

    def test_orthogonal_vector_ties_to_first_class(self):
        by_class = {"a": [[9.0, 8.0, 0, 0, 0, 0]], "b": [[0, 9.0, 8.0, 0, 0, 0]]}
        lib = build_library(by_class, k=2, a=0.8, class_order=("b", "a"))
        result = classify([0, 0, 0, 0, 5.0, 4.0], lib)
        assert set(result.scores.values()) == {0.0}
        assert result.tied
        assert result.predicted == "b"

    def test_all_zero_vector_warns(self):
        lib = build_library({"a": [[1.0, 0.0]], "b": [[0.0, 1.0]]}, k=1, a=0.8)
        result = classify([0.0, 0.0], lib)
        assert result.warnings
        assert result.predicted == "a"

    def test_emotion_examples_end_to_end(self, emotion_library):
        v1 = vector_with_ranking(SAMPLE_SUPPORTS["sample-1"])
        r1 = classify(v1, emotion_library)
        assert r1.predicted == "Anger"
        assert r1.scores["Anger"] == pytest.approx(0.347, abs=0.003)
        # A documented irregularity: feature 624 sits in both this sample
        # and the Fear fingerprint, so Fear scores slightly above zero.
        assert r1.scores["Fear"] == pytest.approx(0.0449, abs=0.0005)
        for cls in ("Neutral", "Disgust", "Happiness", "Sadness", "Surprise"):
            assert r1.scores[cls] == 0.0

        v2 = vector_with_ranking(SAMPLE_SUPPORTS["sample-2"])
        r2 = classify(v2, emotion_library)
        assert r2.predicted == "Neutral"
        assert r2.scores["Neutral"] == pytest.approx(0.437, abs=0.003)

    def test_matches_dense_loop_oracle(self):
        rng = np.random.default_rng(4)
        d, k, a = 16, 5, 0.8
        centers = rng.normal(scale=3.0, size=(5, d))
        by_class = {
            f"g{c}": centers[c] + rng.normal(size=(20, d)) for c in range(5)
        }
        lib = build_library(by_class, k=k, a=a)
        for _ in range(50):
            v = centers[rng.integers(5)] + rng.normal(size=d)
            got = classify(v, lib)
            oracle_scores = {}
            for cls in lib.class_order:
                mu_e = _dense_memberships(aggregate_class(by_class[cls]), k, a)
                mu_u = _dense_memberships(v, k, a)
                total = 0.0
                for cell in range(d):
                    total += min(mu_e[cell], mu_u[cell])
                oracle_scores[cls] = total / lib.norm
            best = max(oracle_scores.values())
            oracle_label = next(
                cls for cls in lib.class_order if oracle_scores[cls] == best
            )
            assert got.predicted == oracle_label
            assert got.scores == pytest.approx(oracle_scores)

    def test_dim_mismatch_rejected(self, emotion_library):
        with pytest.raises(DimensionMismatchError):
            classify(np.zeros(10), emotion_library)


def _dense_memberships(vec, k, a):
    """Oracle-side dense membership vector: sort, rank, fuzzify, scatter."""
    vec = np.asarray(vec, dtype=float)
    order = sorted(range(vec.size), key=lambda i: (-vec[i], i))
    mu = np.zeros(vec.size)
    for rank, idx in enumerate(order[: min(k, vec.size)], start=1):
        mu[idx] = 1.0 - a * (rank - 1) / k
    return mu


class TestLibrary:
    def test_norm_defaults_to_k(self):
        lib = build_library({"a": [[1.0, 0.0]], "b": [[0.0, 1.0]]}, k=1)
        assert lib.norm == 1.0

    def test_class_order_defaults_to_mapping_order(self):
        lib = build_library({"b": [[1.0, 0.0]], "a": [[0.0, 1.0]]}, k=1)
        assert lib.class_order == ("b", "a")

    def test_iteration_follows_class_order(self, emotion_library):
        assert [fp.label for fp in emotion_library] == list(
            emotion_library.class_order
        )

    def test_order_must_cover_classes(self):
        with pytest.raises(ConfigError):
            build_library({"a": [[1.0, 0.0]]}, k=1, class_order=("a", "ghost"))

    def test_mixed_dim_classes_rejected(self):
        with pytest.raises(DimensionMismatchError):
            build_library({"a": [[1.0, 0.0]], "b": [[1.0, 0.0, 0.0]]}, k=1)

    def test_fixture_supports_recovered(self, emotion_library):
        for label, feats in EMOTION_SUPPORTS.items():
            assert emotion_library.fingerprints[label].support == set(feats)
