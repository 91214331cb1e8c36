"""Chain backend selection.

The compiled ``_chain`` extension is used when it was built; otherwise the
pure-Python ``_pychain`` runs the same algorithm (and, for a given seed, the
same trajectory) much more slowly. Set ``SBMCOUNT_BACKEND=python`` to force
the fallback.
"""

from __future__ import annotations

import os

import numpy as np
from scipy.special import gammaln

from . import _pychain
from .graph import Graph, edge_density
from .likelihood import ModelFlavor

try:
    from . import _chain
except ImportError:  # extension not built
    _chain = None

BACKENDS = {"python": _pychain.Chain}
if _chain is not None:
    BACKENDS["cython"] = _chain.Chain

_forced = os.environ.get("SBMCOUNT_BACKEND", "").strip().lower()
if _forced and _forced not in BACKENDS:
    raise ImportError(f"SBMCOUNT_BACKEND={_forced!r} is not available (have {sorted(BACKENDS)})")
DEFAULT_BACKEND = _forced or ("cython" if "cython" in BACKENDS else "python")


def log_factorial_table(graph: Graph, k_max: int) -> np.ndarray:
    """``log(j!)`` for every ``j`` a chain on this graph can index."""
    size = graph.n + max(2 * graph.m, k_max) + 2
    return gammaln(np.arange(size, dtype=np.float64) + 1.0)


def make_chain(
    graph: Graph,
    g,
    k: int,
    *,
    k_max: int | None = None,
    flavor: ModelFlavor = ModelFlavor(),
    q: float | None = None,
    backend: str | None = None,
    swap_shrink: bool = False,
):
    """Chain over (k, g) starting from assignment ``g`` with ``k`` groups."""
    k_max = graph.n if k_max is None else k_max
    q = 1.0 / (graph.n + 1) if q is None else q
    indptr, indices, mult = graph.loopless_csr
    cls = BACKENDS[backend or DEFAULT_BACKEND]
    return cls(
        indptr,
        indices,
        mult,
        graph.self_loops,
        graph.degrees,
        np.asarray(g, dtype=np.int64),
        int(k),
        int(k_max),
        edge_density(graph),
        flavor.degree_corrected,
        float(q),
        log_factorial_table(graph, k_max),
        swap_shrink,
    )
