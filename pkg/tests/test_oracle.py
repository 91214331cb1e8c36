import numpy as np
import pytest

from sbmcount.graph import from_edges, parse_edge_list
from sbmcount.likelihood import DEGREE_CORRECTED, PLAIN
from sbmcount.oracle import (
    TooLargeForEnumeration,
    exact_joint,
    exact_marginal_memberships,
    exact_posterior_k,
    log_evidence_k,
)

TRIANGLE = parse_edge_list("a b\nb c\nc a")


@pytest.mark.parametrize("flavor", [PLAIN, DEGREE_CORRECTED])
def test_single_node_uniform(flavor):
    h = exact_posterior_k(from_edges(1, [], []), 3, flavor)
    assert list(h.values()) == pytest.approx([1 / 3] * 3, abs=1e-12)


def test_two_isolated_nodes():
    h = exact_posterior_k(from_edges(2, [], []), 2, PLAIN)
    assert list(h.values()) == pytest.approx([0.5, 0.5], abs=1e-12)


@pytest.mark.parametrize("n", [1, 3, 5])
def test_empty_graph_uniform(n):
    h = exact_posterior_k(from_edges(n, [], []), 3, PLAIN)
    assert list(h.values()) == pytest.approx([1 / 3] * 3, abs=1e-10)


def test_triangle_frozen():
    # frozen regression values (cross-checked once against an independent loop)
    assert list(exact_posterior_k(TRIANGLE, 2, PLAIN).values()) == pytest.approx(
        [0.5095114668121805, 0.4904885331878194], abs=1e-12
    )
    assert list(exact_posterior_k(TRIANGLE, 3, DEGREE_CORRECTED).values()) == pytest.approx(
        [0.2520888436461777, 0.34107064080991617, 0.40684051554390616], abs=1e-12
    )


def test_joint_normalized_and_complete():
    G, prob = exact_joint(TRIANGLE, 3, PLAIN)
    assert G.shape == (27, 3)
    assert len({tuple(r) for r in G.tolist()}) == 27
    assert prob.sum() == pytest.approx(1.0, abs=1e-12)


def test_marginals_rows_sum_to_one_and_symmetric():
    m = exact_marginal_memberships(from_edges(2, [], []), 2, PLAIN)
    assert np.allclose(m, 0.5, atol=1e-12, rtol=0)
    m = exact_marginal_memberships(TRIANGLE, 3, DEGREE_CORRECTED)
    assert np.allclose(m.sum(axis=1), 1.0)
    assert np.allclose(m, 1 / 3)


def test_guard():
    with pytest.raises(TooLargeForEnumeration):
        exact_posterior_k(from_edges(16, [], []), 3)
    with pytest.raises(TooLargeForEnumeration):
        log_evidence_k(from_edges(30, [], []), 2)
