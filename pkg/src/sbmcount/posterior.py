"""Post-processing of recorded samples: P(k|A), MAP k, memberships."""

from __future__ import annotations

from collections.abc import Iterable, Mapping

import numpy as np
from scipy.optimize import linear_sum_assignment


class KHistogram(dict):
    """Mapping ``k -> probability``; keys are sorted on construction."""

    def __init__(self, probs: Mapping[int, float] | None = None):
        super().__init__(sorted((int(k), float(v)) for k, v in (probs or {}).items()))

    @classmethod
    def from_samples(cls, ks: Iterable[int]) -> "KHistogram":
        ks = np.asarray(list(ks) if not isinstance(ks, np.ndarray) else ks, dtype=np.int64)
        if ks.size == 0:
            raise ValueError("no samples")
        values, counts = np.unique(ks, return_counts=True)
        return cls(dict(zip(values.tolist(), (counts / ks.size).tolist())))

    def as_array(self, k_max: int | None = None) -> np.ndarray:
        """Dense vector indexed by ``k - 1``."""
        top = max(self) if k_max is None else k_max
        out = np.zeros(top)
        for k, v in self.items():
            if k <= top:
                out[k - 1] = v
        return out

    def ranked(self) -> list[int]:
        """Values of k from most to least probable (ties toward smaller k)."""
        return sorted(self, key=lambda k: (-self[k], k))


def map_k(hist: Mapping[int, float]) -> int:
    return min(hist, key=lambda k: (-hist[k], k))


def total_variation(a: Mapping[int, float], b: Mapping[int, float]) -> float:
    keys = set(a) | set(b)
    return 0.5 * sum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys)


def confusion(sample: np.ndarray, reference: np.ndarray, k: int) -> np.ndarray:
    """``C[r, s]`` = nodes with label ``r`` in ``sample`` and ``s`` in ``reference``."""
    return np.bincount(sample * k + reference, minlength=k * k).reshape(k, k)


def align_partition(sample, reference, k: int) -> np.ndarray:
    """Relabel ``sample`` to agree with ``reference`` on as many nodes as possible."""
    sample = np.asarray(sample, dtype=np.int64)
    reference = np.asarray(reference, dtype=np.int64)
    C = confusion(sample, reference, k)
    rows, cols = linear_sum_assignment(C, maximize=True)
    perm = np.empty(k, dtype=np.int64)
    perm[rows] = cols
    # identity is kept whenever it already achieves the optimum
    if C[rows, cols].sum() <= np.trace(C):
        return sample.copy()
    return perm[sample]


class MembershipAccumulator:
    """Running aligned membership counts for one value of k.

    The first partition added becomes the alignment reference.
    """

    def __init__(self, n: int, k: int):
        self.k = k
        self.counts = np.zeros((n, k), dtype=np.int64)
        self.reference: np.ndarray | None = None
        self.samples = 0

    def add(self, g) -> None:
        g = np.asarray(g, dtype=np.int64)
        if self.reference is None:
            self.reference = g.copy()
            aligned = g
        else:
            aligned = align_partition(g, self.reference, self.k)
        self.counts[np.arange(len(aligned)), aligned] += 1
        self.samples += 1


def marginal_memberships(samples, k: int | None = None, reference=None) -> np.ndarray:
    """Row-normalized aligned membership frequencies.

    ``samples`` is either an ``n x k`` count matrix or a sequence of
    assignments at a common k (aligned to ``reference``, default the first).
    """
    arr = np.asarray(samples)
    if arr.ndim == 2 and k is None:
        counts = arr.astype(float)
    else:
        parts = [np.asarray(s, dtype=np.int64) for s in samples]
        if k is None:
            k = int(max(p.max() for p in parts)) + 1
        acc = MembershipAccumulator(len(parts[0]), k)
        if reference is not None:
            acc.reference = np.asarray(reference, dtype=np.int64)
        for part in parts:
            acc.add(part)
        counts = acc.counts.astype(float)
    totals = counts.sum(axis=1, keepdims=True)
    if np.any(totals == 0):
        raise ValueError("node with no recorded membership")
    return counts / totals


def consensus_partition(marginals) -> np.ndarray:
    """Most probable group per node; ``argmax`` already breaks ties toward the smaller label."""
    return np.argmax(np.asarray(marginals), axis=1).astype(np.int64)
