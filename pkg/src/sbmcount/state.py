"""Group assignment plus the block statistics the collapsed posterior needs.

Groups are labelled ``0..k-1``. ``m_rs`` is kept as a full symmetric matrix
whose diagonal counts each in-group edge (and each self-loop) once.
"""

from __future__ import annotations

import numpy as np

from .graph import Graph


class InvalidAssignment(ValueError):
    pass


class InfeasibleShrink(RuntimeError):
    """Raised when ``k -> k-1`` is requested but every group is occupied (or ``k = 1``)."""


class PartitionState:
    def __init__(self, graph: Graph, g: np.ndarray, k: int, sizes, kappa, m_rs):
        self.graph = graph
        self.g = g
        self.k = k
        self.sizes = sizes
        self.kappa = kappa
        self.m_rs = m_rs

    @classmethod
    def build(cls, graph: Graph, g, k: int) -> "PartitionState":
        g = np.array(g, dtype=np.int64)
        if g.shape != (graph.n,):
            raise InvalidAssignment(f"assignment has length {g.size}, graph has {graph.n} nodes")
        if k < 1 or (g.size and (g.min() < 0 or g.max() >= k)):
            raise InvalidAssignment(f"group labels must lie in 0..{k - 1}")
        sizes = np.bincount(g, minlength=k).astype(np.int64)
        kappa = np.bincount(g, weights=graph.degrees, minlength=k).astype(np.int64)
        m_rs = np.zeros((k, k), dtype=np.int64)
        for u, v, c in graph.edges():
            r, s = g[u], g[v]
            m_rs[r, s] += c
            if r != s:
                m_rs[s, r] += c
        return cls(graph, g, k, sizes, kappa, m_rs)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def nonempty(self) -> int:
        return int(np.count_nonzero(self.sizes))

    def copy(self) -> "PartitionState":
        return PartitionState(
            self.graph, self.g.copy(), self.k, self.sizes.copy(), self.kappa.copy(), self.m_rs.copy()
        )

    def block_neighbor_counts(self, i: int) -> tuple[np.ndarray, int]:
        """Edge endpoints from ``i`` into each group, and ``i``'s self-loop count separately."""
        counts = np.zeros(self.k, dtype=np.int64)
        loops = 0
        for j, c in self.graph.neighbors(i):
            if j == i:
                loops = c
            else:
                counts[self.g[j]] += c
        return counts, loops

    def move_node(self, i: int, s: int) -> None:
        if not 0 <= s < self.k:
            raise InvalidAssignment(f"group {s} outside 0..{self.k - 1}")
        a = self.g[i]
        if a == s:
            return
        e, loops = self.block_neighbor_counts(i)
        d = self.graph.degrees[i]
        self.sizes[a] -= 1
        self.sizes[s] += 1
        self.kappa[a] -= d
        self.kappa[s] += d
        # the node's own contribution to the counts moves from row a to row s
        self.m_rs[a, :] -= e
        self.m_rs[:, a] -= e
        self.m_rs[a, a] += e[a] - loops
        self.g[i] = s
        self.m_rs[s, :] += e
        self.m_rs[:, s] += e
        self.m_rs[s, s] += loops - e[s]

    def change_k(self, delta: int, k_max: int | None = None) -> None:
        """Add an empty group at label ``k`` (``+1``), or remove one empty group (``-1``).

        For ``-1`` an occupied top group first swaps labels with the highest
        empty label, so labels stay contiguous.
        """
        if delta == 1:
            if k_max is not None and self.k >= k_max:
                raise InfeasibleShrink(f"k is already at its cap {k_max}")
            self.k += 1
            self.sizes = np.append(self.sizes, 0)
            self.kappa = np.append(self.kappa, 0)
            m = np.zeros((self.k, self.k), dtype=np.int64)
            m[:-1, :-1] = self.m_rs
            self.m_rs = m
        elif delta == -1:
            empty = np.flatnonzero(self.sizes == 0)
            if self.k == 1 or empty.size == 0:
                raise InfeasibleShrink("no empty group to remove" if self.k > 1 else "k is already 1")
            if self.sizes[-1] != 0:
                self.swap_labels(int(empty[-1]), self.k - 1)
            self.k -= 1
            self.sizes = self.sizes[:-1].copy()
            self.kappa = self.kappa[:-1].copy()
            self.m_rs = self.m_rs[:-1, :-1].copy()
        else:
            raise ValueError("delta must be +1 or -1")

    def swap_labels(self, a: int, b: int) -> None:
        """Exchange the names of groups ``a`` and ``b`` in place."""
        if a == b:
            return
        idx = np.array([a, b])
        ga, gb = self.g == a, self.g == b
        self.g[ga], self.g[gb] = b, a
        self.sizes[idx] = self.sizes[idx[::-1]]
        self.kappa[idx] = self.kappa[idx[::-1]]
        self.m_rs[idx, :] = self.m_rs[idx[::-1], :]
        self.m_rs[:, idx] = self.m_rs[:, idx[::-1]]

    def relabel(self, perm) -> "PartitionState":
        """State with group ``r`` renamed ``perm[r]``."""
        perm = np.asarray(perm)
        return PartitionState.build(self.graph, perm[self.g], self.k)

    def same_stats(self, other: "PartitionState") -> bool:
        return (
            self.k == other.k
            and np.array_equal(self.g, other.g)
            and np.array_equal(self.sizes, other.sizes)
            and np.array_equal(self.kappa, other.kappa)
            and np.array_equal(self.m_rs, other.m_rs)
        )
