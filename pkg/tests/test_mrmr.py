import math

import numpy as np
import pytest

from oracles import direct_entropy, direct_mutual_information, greedy_mrmr_oracle
from peakcast.errors import DataError, DimensionMismatchError
from peakcast.mrmr import (
    DiscretizedVariable,
    FeatureSet,
    binary_variable,
    discretize,
    entropy,
    format_selection_report,
    mutual_information,
    redundancy,
    relevance,
    select_features,
)


def labels(seq) -> DiscretizedVariable:
    seq = np.asarray(seq)
    return DiscretizedVariable(labels=seq, bin_count=int(seq.max()) + 1)


# --- discretization ---------------------------------------------------------------


def test_equal_width_split():
    var = discretize([0.0, 1.0, 2.0, 3.0], bin_count=2)
    assert var.labels.tolist() == [0, 0, 1, 1]
    assert var.bin_count == 2


def test_constant_input_collapses_to_single_bin():
    var = discretize([4.2] * 10, bin_count=8)
    assert var.bin_count == 1
    assert var.labels.tolist() == [0] * 10
    assert entropy(var) == 0.0


def test_max_lands_in_top_bin():
    rng = np.random.default_rng(0)
    for _ in range(20):
        values = rng.normal(size=50) * rng.uniform(0.1, 100)
        var = discretize(values, bin_count=8)
        assert var.labels.max() == 7 or var.bin_count == 1
        assert var.labels.min() >= 0
        assert var.labels[np.argmax(values)] == var.bin_count - 1


def test_discretize_rejects_bad_input():
    with pytest.raises(DataError):
        discretize([], 4)
    with pytest.raises(DataError):
        discretize([1.0, 2.0], 1)
    with pytest.raises(DataError):
        discretize([1.0, np.nan], 4)


def test_binary_passthrough():
    var = binary_variable([0, 1, 1, 0])
    assert var.bin_count == 2
    with pytest.raises(DataError):
        binary_variable([0, 2, 1])


# --- mutual information -------------------------------------------------------------


def test_mi_independent_pair_is_exactly_zero():
    a = labels([0, 0, 1, 1])
    b = labels([0, 1, 0, 1])
    assert mutual_information(a, b) == 0.0


def test_mi_self_is_entropy_of_fair_binary():
    a = labels([0, 0, 1, 1])
    assert abs(mutual_information(a, a) - math.log(2)) < 1e-12
    assert abs(entropy(a) - math.log(2)) < 1e-12


def test_mi_matches_direct_joint_table_summation():
    rng = np.random.default_rng(42)
    base = rng.integers(0, 4, size=200)
    noisy = (base + rng.integers(0, 2, size=200)) % 4
    a, b = labels(base), labels(noisy)
    expected = direct_mutual_information(base, noisy)
    assert abs(mutual_information(a, b) - expected) < 1e-12


def test_mi_symmetry_is_exact():
    rng = np.random.default_rng(3)
    for _ in range(30):
        a = labels(rng.integers(0, 5, size=80))
        b = labels(rng.integers(0, 3, size=80))
        assert mutual_information(a, b) == mutual_information(b, a)


def test_mi_non_negative_and_bounded_by_entropies():
    rng = np.random.default_rng(9)
    for _ in range(30):
        a = labels(rng.integers(0, 6, size=60))
        b = labels(rng.integers(0, 4, size=60))
        value = mutual_information(a, b)
        assert value >= 0.0
        assert value <= min(entropy(a), entropy(b)) + 1e-9


def test_mi_sample_count_mismatch():
    with pytest.raises(DimensionMismatchError):
        mutual_information(labels([0, 1]), labels([0, 1, 0]))


# --- relevance and redundancy ---------------------------------------------------------


def test_relevance_of_singleton_and_equal_pair():
    rng = np.random.default_rng(11)
    c = labels(rng.integers(0, 4, size=100))
    x = labels((c.labels + rng.integers(0, 2, size=100)) % 4)
    assert relevance([x], c) == mutual_information(x, c)

    # two copies of the same feature: the mean equals the common value
    assert abs(relevance([x, x], c) - mutual_information(x, c)) < 1e-15


def test_redundancy_singleton_is_entropy():
    x = labels([0, 1, 2, 0, 1, 2])
    assert redundancy([x]) == mutual_information(x, x)
    assert abs(redundancy([x]) - entropy(x)) < 1e-12


def test_redundancy_of_independent_pair_is_half_entropy():
    a = labels([0, 0, 1, 1])
    b = labels([0, 1, 0, 1])
    h = entropy(a)
    assert abs(redundancy([a, b]) - h / 2) < 1e-12


def test_redundancy_matches_double_loop():
    rng = np.random.default_rng(5)
    feats = [labels(rng.integers(0, 4, size=120)) for _ in range(3)]
    expected = 0.0
    for xi in feats:
        for xj in feats:
            expected += direct_mutual_information(xi.labels, xj.labels)
    expected /= 9
    assert abs(redundancy(feats) - expected) < 1e-12


def test_empty_subset_errors():
    with pytest.raises(DataError):
        relevance([], labels([0, 1]))
    with pytest.raises(DataError):
        redundancy([])


# --- greedy selection -------------------------------------------------------------


def make_feature_set(arrays, target):
    feats = tuple(labels(a) for a in arrays)
    return FeatureSet(
        features=feats,
        names=tuple(f"f{i}" for i in range(len(feats))),
        target=labels(target),
    )


def test_target_copy_is_picked_first():
    rng = np.random.default_rng(2)
    c = rng.integers(0, 4, size=150)
    noise1 = rng.integers(0, 4, size=150)
    related = (c + rng.integers(0, 2, size=150)) % 4
    fs = make_feature_set([noise1, related, c.copy()], c)
    result = select_features(fs, k=2)
    assert result.selected_indices[0] == 2


def test_duplicate_of_selected_is_deferred():
    rng = np.random.default_rng(4)
    c = rng.integers(0, 4, size=200)
    best = (c + rng.integers(0, 2, size=200)) % 4  # strongly related
    other = (c + rng.integers(0, 3, size=200)) % 4  # weaker but informative
    fs = make_feature_set([best, best.copy(), other], c)
    result = select_features(fs, k=2)
    assert result.selected_indices[0] == 0  # ties break to the lowest index
    assert result.selected_indices[1] == 2  # the copy loses to the fresh feature


def test_selection_matches_bruteforce_greedy_oracle():
    rng = np.random.default_rng(7)
    c = rng.integers(0, 4, size=250)
    arrays = [
        (c + rng.integers(0, m, size=250)) % 4 for m in (2, 3, 4, 5, 2, 6)
    ]
    fs = make_feature_set(arrays, c)
    result = select_features(fs, k=3)
    order, rel, red, score = greedy_mrmr_oracle(
        list(fs.features), fs.target, 3, mutual_information
    )
    assert list(result.selected_indices) == order
    assert list(result.relevance_trace) == rel
    assert list(result.redundancy_trace) == red
    assert list(result.score_trace) == score


def test_traces_grow_one_per_pick_and_validation():
    rng = np.random.default_rng(12)
    c = rng.integers(0, 3, size=90)
    fs = make_feature_set([rng.integers(0, 3, size=90) for _ in range(5)], c)
    result = select_features(fs, k=4)
    assert len(result.selected_indices) == 4
    assert len(set(result.selected_indices)) == 4
    assert (
        len(result.relevance_trace)
        == len(result.redundancy_trace)
        == len(result.score_trace)
        == 4
    )
    with pytest.raises(DataError):
        select_features(fs, k=0)
    with pytest.raises(DataError):
        select_features(fs, k=6)


def test_permutation_invariance():
    rng = np.random.default_rng(21)
    c = rng.integers(0, 4, size=70)
    arrays = [(c + rng.integers(0, m, size=70)) % 4 for m in (2, 4, 3)]
    fs = make_feature_set(arrays, c)
    result = select_features(fs, k=3)

    perm = rng.permutation(70)
    fs_p = make_feature_set([a[perm] for a in arrays], c[perm])
    result_p = select_features(fs_p, k=3)
    assert result.selected_indices == result_p.selected_indices
    assert result.relevance_trace == result_p.relevance_trace
    assert result.redundancy_trace == result_p.redundancy_trace
    assert result.score_trace == result_p.score_trace
    a, b = fs.features[0], fs.features[1]
    ap, bp = fs_p.features[0], fs_p.features[1]
    assert mutual_information(a, b) == mutual_information(ap, bp)


def test_report_format():
    rng = np.random.default_rng(6)
    c = rng.integers(0, 3, size=50)
    fs = make_feature_set([(c + rng.integers(0, m, size=50)) % 3 for m in (2, 3)], c)
    result = select_features(fs, k=2)
    text = format_selection_report(result, fs.names)
    lines = text.splitlines()
    assert lines[0] == "rank\tfeature"
    assert lines[1].startswith("1\tf")
    assert "pick\trelevance\tredundancy\tscore" in lines
