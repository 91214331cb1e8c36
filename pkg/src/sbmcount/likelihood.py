"""Collapsed log-posterior of the (degree-corrected) Poisson block model.

Every quantity is a log and every factorial goes through ``gammaln``.
Global constants that cancel in ratios (``P(A)``, ``P(k) = 1/n`` and the
multiplicative constants of the likelihood) are left out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .state import PartitionState


@dataclass(frozen=True)
class ModelFlavor:
    degree_corrected: bool = True


DEGREE_CORRECTED = ModelFlavor(True)
PLAIN = ModelFlavor(False)


def _logfact(x):
    return gammaln(np.asarray(x, dtype=float) + 1.0)


def log_p_g_given_k(state: PartitionState, n: int | None = None) -> float:
    """``log[(k-1)! / (n+k-1)! * prod_r n_r!]`` -- group-assignment prior with gamma integrated out."""
    n = state.n if n is None else n
    k = state.k
    return float(gammaln(k) - gammaln(n + k) + _logfact(state.sizes).sum())


def _pair_terms(m, base):
    return _logfact(m) - (m + 1.0) * np.log(base)


def log_p_a_given_g(state: PartitionState, p: float) -> float:
    """Edge likelihood with the block rates integrated against an exponential prior of mean ``p``."""
    nr = state.sizes.astype(float)
    m = state.m_rs.astype(float)
    diag = _pair_terms(np.diag(m), 0.5 * p * nr**2 + 1.0).sum()
    iu = np.triu_indices(state.k, 1)
    off = _pair_terms(m[iu], p * np.outer(nr, nr)[iu] + 1.0).sum()
    return float(diag + off)


def log_dc_factor(state: PartitionState) -> float:
    """Extra term from integrating out per-node degree parameters; empty groups contribute nothing."""
    nz = state.sizes > 0
    nr = state.sizes[nz].astype(float)
    kap = state.kappa[nz].astype(float)
    return float((kap * np.log(nr) + gammaln(nr) - gammaln(nr + kap)).sum())


def log_weight(state: PartitionState, p: float, flavor: ModelFlavor = DEGREE_CORRECTED) -> float:
    out = log_p_g_given_k(state) + log_p_a_given_g(state, p)
    if flavor.degree_corrected:
        out += log_dc_factor(state)
    return out


def log_k_ratio(k: int, n: int) -> float:
    """``log P(k+1, g | A) - log P(k, g | A)`` for a fixed assignment."""
    return float(np.log(k) - np.log(n + k))


def _group_terms(sizes, kappa, m_rs, groups, p, dc):
    # every posterior term that involves at least one of ``groups``
    groups = sorted(set(groups))
    total = 0.0
    nr = sizes.astype(float)
    for r in groups:
        total += gammaln(nr[r] + 1.0)
        total += _pair_terms(float(m_rs[r, r]), 0.5 * p * nr[r] ** 2 + 1.0)
        for s in range(len(sizes)):
            if s == r or (s in groups and s < r):
                continue
            total += _pair_terms(float(m_rs[r, s]), p * nr[r] * nr[s] + 1.0)
        if dc and sizes[r] > 0:
            total += kappa[r] * np.log(nr[r]) + gammaln(nr[r]) - gammaln(nr[r] + kappa[r])
    return float(total)


def log_weight_delta_move(
    state: PartitionState, i: int, s: int, p: float, flavor: ModelFlavor = DEGREE_CORRECTED
) -> float:
    """Change in :func:`log_weight` if node ``i`` moved to group ``s``; touches two groups only."""
    a = int(state.g[i])
    if a == s:
        return 0.0
    dc = flavor.degree_corrected
    before = _group_terms(state.sizes, state.kappa, state.m_rs, (a, s), p, dc)

    e, loops = state.block_neighbor_counts(i)
    d = state.graph.degrees[i]
    sizes = state.sizes.copy()
    kappa = state.kappa.copy()
    sizes[a] -= 1
    sizes[s] += 1
    kappa[a] -= d
    kappa[s] += d
    m_rs = state.m_rs.copy()
    others = np.ones(state.k, dtype=bool)
    others[[a, s]] = False
    m_rs[a, others] -= e[others]
    m_rs[s, others] += e[others]
    m_rs[others, a] = m_rs[a, others]
    m_rs[others, s] = m_rs[s, others]
    m_rs[a, a] -= e[a] + loops
    m_rs[s, s] += e[s] + loops
    m_rs[a, s] += e[a] - e[s]
    m_rs[s, a] = m_rs[a, s]
    after = _group_terms(sizes, kappa, m_rs, (a, s), p, dc)
    return after - before
