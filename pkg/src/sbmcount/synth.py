"""Poisson stochastic-block-model networks and planted-partition benchmarks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph, from_edges


@dataclass(frozen=True)
class SbmParams:
    """Group sizes and the symmetric matrix of expected edge counts per node pair."""

    sizes: tuple[int, ...]
    omega: np.ndarray

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        k = len(self.sizes)
        if omega.shape != (k, k) or not np.allclose(omega, omega.T):
            raise ValueError("omega must be a symmetric k x k matrix")
        if np.any(omega < 0) or any(s < 1 for s in self.sizes):
            raise ValueError("rates must be non-negative and group sizes positive")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))

    @property
    def k(self) -> int:
        return len(self.sizes)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    def expected_edges(self) -> float:
        s = np.asarray(self.sizes, dtype=float)
        # 0.5 * sum_rs n_r n_s w_rs counts each off-diagonal pair once and
        # the diagonal as n_r^2 w_rr / 2 (pairs plus half-weight self-loops)
        return 0.5 * float(s @ self.omega @ s)

    def planted(self) -> np.ndarray:
        return np.repeat(np.arange(self.k), self.sizes)


def generate_sbm(params: SbmParams, seed=None) -> tuple[Graph, np.ndarray]:
    """Sample a network; returns it with the planted assignment.

    Each pair ``i < j`` gets ``Poisson(w_{g_i g_j})`` edges and each node
    ``Poisson(w_{g_i g_i} / 2)`` self-loops. Implemented per block pair:
    draw the block's Poisson total, then scatter edges uniformly over the
    block's (ordered, for diagonal blocks) node pairs, which has the same
    joint distribution and runs in O(n + m).
    """
    rng = np.random.default_rng(seed)
    offsets = np.concatenate([[0], np.cumsum(params.sizes)])
    us, vs = [], []
    for r in range(params.k):
        nr = params.sizes[r]
        for s in range(r, params.k):
            ns = params.sizes[s]
            mean = params.omega[r, s] * nr * ns * (0.5 if r == s else 1.0)
            count = rng.poisson(mean)
            if count == 0:
                continue
            us.append(offsets[r] + rng.integers(0, nr, size=count))
            vs.append(offsets[s] + rng.integers(0, ns, size=count))
    n = params.n
    if us:
        u, v = np.concatenate(us), np.concatenate(vs)
    else:
        u = v = np.zeros(0, dtype=np.int64)
    return from_edges(n, u, v), params.planted()


def planted_params(k: int, group_size: int, c_in: float, c_out: float) -> SbmParams:
    """Rates ``c_in / n`` within groups and ``c_out / n`` between them, ``n = k * group_size``."""
    n = k * group_size
    omega = np.full((k, k), c_out / n)
    np.fill_diagonal(omega, c_in / n)
    return SbmParams((group_size,) * k, omega)


def planted_partition(k: int, group_size: int, c_in: float, c_out: float, seed=None) -> tuple[Graph, np.ndarray]:
    return generate_sbm(planted_params(k, group_size, c_in, c_out), seed)


def degree_params(k: int, group_size: int, in_degree: float, out_degree: float) -> SbmParams:
    """Rates giving each node ``in_degree`` expected edges to its own group and
    ``out_degree`` to each other group."""
    omega = np.full((k, k), out_degree / group_size)
    np.fill_diagonal(omega, in_degree / group_size)
    return SbmParams((group_size,) * k, omega)


def split_mean_degree(k: int, mean_degree: float, gap: float) -> tuple[float, float]:
    """``(c_in, c_out)`` with ``c_in - c_out = gap`` and ``(c_in + (k-1) c_out) / k = mean_degree``."""
    c_out = mean_degree - gap / k
    c_in = c_out + gap
    if c_out < 0:
        raise ValueError(f"gap {gap} too large for mean degree {mean_degree} at k={k}")
    return c_in, c_out


def detectability_threshold(k: int, mean_degree: float) -> float:
    """Smallest ``c_in - c_out`` at which planted groups are detectable: ``k * sqrt(mean_degree)``.

    Meaningless for ``k = 1`` (returns 0).
    """
    if k <= 1:
        return 0.0
    return k * math.sqrt(mean_degree)


def write_planted(path, graph: Graph, planted) -> None:
    """Sidecar file: one ``label group`` line per node."""
    with open(path, "w") as fh:
        for label, grp in zip(graph.labels, planted):
            fh.write(f"{label} {int(grp)}\n")


def read_planted(path) -> dict[str, int]:
    out = {}
    with open(path) as fh:
        for line in fh:
            if line.strip():
                label, grp = line.split()
                out[label] = int(grp)
    return out
