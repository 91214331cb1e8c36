import numpy as np
import pytest

from sbmcount.posterior import (
    KHistogram,
    MembershipAccumulator,
    align_partition,
    confusion,
    consensus_partition,
    map_k,
    marginal_memberships,
    total_variation,
)


def test_histogram_from_samples():
    h = KHistogram.from_samples([2, 2, 3, 1, 2, 3])
    assert list(h) == [1, 2, 3]
    assert h[2] == pytest.approx(0.5)
    assert h.as_array().tolist() == pytest.approx([1 / 6, 0.5, 1 / 3])
    assert h.as_array(5)[3:].tolist() == [0.0, 0.0]
    assert h.ranked() == [2, 3, 1]
    with pytest.raises(ValueError):
        KHistogram.from_samples([])


def test_map_k_ties_go_to_smaller_k():
    assert map_k({3: 0.4, 2: 0.4, 5: 0.2}) == 2
    assert map_k(KHistogram.from_samples([4, 4, 1])) == 4


def test_total_variation():
    assert total_variation({1: 1.0}, {2: 1.0}) == 1.0
    assert total_variation({1: 0.5, 2: 0.5}, {1: 0.5, 2: 0.5}) == 0.0
    assert total_variation({1: 0.7, 2: 0.3}, {1: 0.5, 3: 0.5}) == pytest.approx(0.5)


def test_confusion():
    C = confusion(np.array([0, 0, 1]), np.array([1, 1, 0]), 2)
    assert C.tolist() == [[0, 2], [1, 0]]


def test_align_undoes_permutation(rng):
    ref = rng.integers(0, 4, 50)
    perm = np.array([2, 0, 3, 1])
    assert np.array_equal(align_partition(perm[ref], ref, 4), ref)


def test_align_keeps_identity_on_ties():
    ref = np.array([0, 1])
    sample = np.array([1, 1])
    # mapping 1 -> 0 or 1 -> 1 both agree on one node; the identity must be kept
    assert align_partition(sample, ref, 2).tolist() == [1, 1]


def test_accumulator_and_marginals():
    acc = MembershipAccumulator(3, 2)
    acc.add([0, 0, 1])
    acc.add([1, 1, 0])  # same partition, swapped labels
    acc.add([0, 1, 1])
    assert acc.samples == 3
    assert acc.counts.tolist() == [[3, 0], [2, 1], [0, 3]]
    marg = marginal_memberships(acc.counts)
    assert np.allclose(marg.sum(axis=1), 1)
    assert consensus_partition(marg).tolist() == [0, 0, 1]
    again = marginal_memberships([[0, 0, 1], [1, 1, 0], [0, 1, 1]], k=2)
    assert np.allclose(again, marg)


def test_marginals_with_reference():
    m = marginal_memberships([[1, 0], [1, 0]], k=2, reference=[0, 1])
    assert m.tolist() == [[1.0, 0.0], [0.0, 1.0]]


def test_marginals_need_counts():
    with pytest.raises(ValueError):
        marginal_memberships(np.zeros((2, 2)))


def test_consensus_tie_breaks_low():
    assert consensus_partition([[0.5, 0.5], [0.2, 0.8]]).tolist() == [0, 1]
