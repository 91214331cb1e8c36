"""Exact posterior over k by enumerating every labelled assignment.

Deliberately naive: statistics are recomputed from the edge list for each
assignment, independently of :mod:`sbmcount.state` and of the chain kernels.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.special import gammaln, logsumexp

from .graph import Graph, edge_density
from .likelihood import ModelFlavor
from .posterior import KHistogram

MAX_ASSIGNMENTS = 10**7
_CHUNK = 1 << 15


class TooLargeForEnumeration(ValueError):
    pass


def _check_size(n: int, k_max: int) -> None:
    if float(k_max) ** n > MAX_ASSIGNMENTS:
        raise TooLargeForEnumeration(f"{k_max}^{n} assignments exceeds {MAX_ASSIGNMENTS}")


def _assignments(n: int, k: int):
    # all k**n label vectors in lexicographic order, in chunks
    it = itertools.product(range(k), repeat=n)
    while True:
        block = list(itertools.islice(it, _CHUNK))
        if not block:
            return
        yield np.array(block, dtype=np.int64).reshape(len(block), n)


def log_weights(graph: Graph, k: int, flavor: ModelFlavor = ModelFlavor()):
    """Yield ``(assignments, log P(k, g | A) + const)`` chunks over all ``g`` in ``{0..k-1}^n``."""
    n = graph.n
    p = edge_density(graph)
    eu, ev, ec = (np.array(x) for x in zip(*graph.edges())) if graph.m else (np.zeros(0, int),) * 3
    deg = graph.degrees
    for G in _assignments(n, k):
        rows = np.arange(len(G))
        onehot = (G[:, :, None] == np.arange(k)).astype(np.int64)  # (B, n, k)
        sizes = onehot.sum(axis=1)
        kappa = (onehot * deg[None, :, None]).sum(axis=1)
        M = np.zeros((len(G), k, k), dtype=np.int64)
        for u, v, c in zip(eu, ev, ec):
            r, s = G[:, u], G[:, v]
            np.add.at(M, (rows, r, s), c)
            off = r != s
            np.add.at(M, (rows[off], s[off], r[off]), c)

        nr = sizes.astype(float)
        lw = gammaln(k) - gammaln(n + k) + gammaln(nr + 1).sum(axis=1)
        for r in range(k):
            m = M[:, r, r].astype(float)
            lw += gammaln(m + 1) - (m + 1) * np.log(0.5 * p * nr[:, r] ** 2 + 1)
            for s in range(r + 1, k):
                m = M[:, r, s].astype(float)
                lw += gammaln(m + 1) - (m + 1) * np.log(p * nr[:, r] * nr[:, s] + 1)
        if flavor.degree_corrected:
            for r in range(k):
                a, b = nr[:, r], kappa[:, r].astype(float)
                ok = a > 0
                term = np.zeros(len(G))
                term[ok] = b[ok] * np.log(a[ok]) + gammaln(a[ok]) - gammaln(a[ok] + b[ok])
                lw += term
        yield G, lw


def log_evidence_k(graph: Graph, k: int, flavor: ModelFlavor = ModelFlavor()) -> float:
    """``log sum_g P(k, g | A)`` up to the same constant for every ``k``."""
    _check_size(graph.n, k)
    return float(logsumexp(np.concatenate([lw for _, lw in log_weights(graph, k, flavor)])))


def exact_posterior_k(graph: Graph, k_max: int, flavor: ModelFlavor = ModelFlavor()) -> KHistogram:
    """``P(k | A)`` over ``k = 1..k_max`` with the k-prior truncated to that range."""
    _check_size(graph.n, k_max)
    logz = np.array([log_evidence_k(graph, k, flavor) for k in range(1, k_max + 1)])
    probs = np.exp(logz - logsumexp(logz))
    return KHistogram({k: float(pk) for k, pk in enumerate(probs, 1)})


def exact_joint(graph: Graph, k: int, flavor: ModelFlavor = ModelFlavor()):
    """All assignments at fixed ``k`` and their normalized conditional probabilities ``P(g | k, A)``."""
    _check_size(graph.n, k)
    parts = list(log_weights(graph, k, flavor))
    G = np.concatenate([a for a, _ in parts])
    lw = np.concatenate([b for _, b in parts])
    return G, np.exp(lw - logsumexp(lw))


def exact_marginal_memberships(graph: Graph, k: int, flavor: ModelFlavor = ModelFlavor()) -> np.ndarray:
    """``P(g_i = r | k, A)`` as an ``n x k`` matrix."""
    G, prob = exact_joint(graph, k, flavor)
    out = np.zeros((graph.n, k))
    for r in range(k):
        out[:, r] = ((G == r) * prob[:, None]).sum(axis=0)
    return out
