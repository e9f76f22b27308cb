from __future__ import annotations

import math

import numpy as np
import pytest

from claimsbench.claimsgen import RecordSequence
from claimsbench.features import (
    HdpsThresholds,
    apply_hdps,
    apply_standardizer,
    count_features,
    count_matrix,
    fit_hdps,
    fit_standardizer,
)
from claimsbench.seeding import derive_rng


def seq_of(*records):
    return RecordSequence.from_records(records)


def random_seq(rng, d_x, max_t=10):
    t = int(rng.integers(1, max_t + 1))
    hits = rng.random((t, d_x)) < rng.uniform(0.1, 0.6)
    return RecordSequence.from_records(np.nonzero(row)[0] for row in hits)


# -- counts -----------------------------------------------------------------

def test_count_entry_per_record():
    seq = seq_of([3], [3, 1], [], [2], [3])
    counts = count_features(seq, 5)
    assert counts[3] == 3
    assert counts[1] == 1
    assert counts[0] == 0


def test_count_all_empty_records():
    assert np.array_equal(count_features(seq_of([], []), 4), np.zeros(4))


def test_count_matches_brute_force():
    rng = derive_rng(30, "counts")
    for _ in range(300):
        seq = random_seq(rng, d_x=7)
        counts = count_features(seq, 7)
        brute = [sum(1 for rec in seq.records if k in rec) for k in range(7)]
        assert np.array_equal(counts, brute)


# -- standardizer --------------------------------------------------------------

def test_standardizer_hand_example():
    counts = np.array([[0.0], [2.0], [4.0]])
    stats = fit_standardizer(counts)
    assert stats.mean[0] == pytest.approx(2.0)
    assert stats.std[0] == pytest.approx(math.sqrt(8 / 3))
    out = apply_standardizer(counts, stats)
    assert out[:, 0] == pytest.approx([-1.224744871, 0.0, 1.224744871])


def test_standardizer_constant_column_maps_to_zero():
    counts = np.full((5, 2), 3.0)
    counts[:, 1] = np.arange(5)
    stats = fit_standardizer(counts)
    out = apply_standardizer(counts, stats)
    assert np.all(out[:, 0] == 0.0)
    assert out[:, 1].std() > 0


def test_standardized_columns_zero_mean_unit_std():
    rng = derive_rng(31, "std")
    counts = rng.poisson(3.0, size=(500, 6)).astype(float)
    stats = fit_standardizer(counts)
    out = apply_standardizer(counts, stats)
    for k in range(6):
        if counts[:, k].std() > 0:
            assert abs(out[:, k].mean()) < 1e-10
            assert abs(out[:, k].std() - 1.0) < 1e-10


def test_standardizer_needs_two_rows():
    with pytest.raises(ValueError):
        fit_standardizer(np.ones((1, 3)))


# -- HDPS ---------------------------------------------------------------------

def test_hdps_all_three_indicators():
    thresholds = HdpsThresholds(median=np.array([2.0]), p75=np.array([4.0]))
    assert apply_hdps(np.array([5.0]), thresholds)[0].tolist() == [1, 1, 1]


def test_hdps_zero_count():
    thresholds = HdpsThresholds(median=np.array([2.0]), p75=np.array([4.0]))
    assert apply_hdps(np.array([0.0]), thresholds)[0].tolist() == [0, 0, 0]


def test_hdps_strictly_more_than_median():
    thresholds = HdpsThresholds(median=np.array([2.0]), p75=np.array([4.0]))
    assert apply_hdps(np.array([2.0]), thresholds)[0].tolist() == [1, 0, 0]


def test_hdps_output_shape_and_binary():
    rng = derive_rng(32, "hdps")
    counts = rng.poisson(2.0, size=(200, 9)).astype(float)
    thresholds = fit_hdps(counts)
    out = apply_hdps(counts, thresholds)
    assert out.shape == (200, 27)
    assert set(np.unique(out)) <= {0.0, 1.0}


def test_hdps_monotone_in_count():
    rng = derive_rng(33, "hdps-mono")
    counts = rng.poisson(2.0, size=(100, 4)).astype(float)
    thresholds = fit_hdps(counts)
    for _ in range(200):
        row = rng.poisson(2.0, size=4).astype(float)
        bumped = row.copy()
        k = int(rng.integers(0, 4))
        bumped[k] += 1
        before = apply_hdps(row, thresholds)[0]
        after = apply_hdps(bumped, thresholds)[0]
        assert np.all(after >= before)


def test_hdps_percentiles_match_sort_oracle():
    rng = derive_rng(34, "hdps-rank")
    for _ in range(100):
        n = int(rng.integers(1, 40))
        counts = rng.poisson(3.0, size=(n, 3)).astype(float)
        thresholds = fit_hdps(counts)
        for k in range(3):
            ordered = sorted(counts[:, k])
            assert thresholds.median[k] == ordered[math.ceil(0.5 * n) - 1]
            assert thresholds.p75[k] == ordered[math.ceil(0.75 * n) - 1]
            assert thresholds.median[k] <= thresholds.p75[k]


def test_hdps_rejects_vocabulary_mismatch():
    thresholds = fit_hdps(np.ones((10, 4)))
    with pytest.raises(ValueError):
        apply_hdps(np.ones(5), thresholds)


def test_feature_matrix_stacks_counts():
    seqs = [seq_of([0], [1]), seq_of([2], [2])]
    mat = count_matrix(seqs, 3)
    assert mat.shape == (2, 3)
    assert mat[1, 2] == 2
