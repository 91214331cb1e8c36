"""Joint Markov chain over the group count k and the assignment g.

Two move types: a heat-bath reassignment of one node at fixed k, and a
k -> k +/- 1 proposal at fixed g. A *sweep* is ``n + 1`` elementary steps,
each a k-move with probability ``q`` (default ``1/(n+1)``), so on average a
sweep makes ``n`` node updates and one k update.

Seeding: run ``r`` of a multi-run uses
``np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(r,))))``.
Both chain backends consume that stream identically.

k-move rules (``SamplerConfig.k_move``):

``"exact"``
    Growing inserts an empty group at a uniformly random label position;
    shrinking picks a uniformly random group and deletes it if it is empty
    (labels above it shift down). Both proposals have probability
    ``1/(k+1)`` between the same pair of states, so acceptance is just
    ``k/(n+k)`` for growth and 1 for a feasible shrink, and the chain is
    reversible with respect to ``P(k, g | A)`` over labelled assignments.
``"swap"``
    Shrinking is accepted whenever some group is empty; an occupied top
    group is first relabelled to the highest empty label. This is the
    original form of the move. It favours small k relative to the exact
    posterior (the shrink ignores how many labellings each partition has),
    but it is the rule behind the reference real-network histograms.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .graph import Graph, edge_density
from .kernels import DEFAULT_BACKEND, make_chain
from .likelihood import ModelFlavor, log_k_ratio, log_weight_delta_move
from .posterior import KHistogram, MembershipAccumulator, map_k
from .state import InfeasibleShrink, PartitionState

K_MOVES = ("exact", "swap")
SELECTIONS = ("weight", "likelihood")
DEFAULT_K_INIT = 10


@dataclass(frozen=True)
class SamplerConfig:
    sweeps: int = 2000
    burnin_sweeps: int = 1000
    sample_interval: int = 1
    runs: int = 10
    seed: int = 0
    k_init: int | None = None  # None -> min(DEFAULT_K_INIT, k_max)
    k_max: int | None = None  # None -> n
    flavor: ModelFlavor = ModelFlavor(degree_corrected=True)
    q: float | None = None  # None -> 1/(n+1)
    k_move: str = "exact"
    select: str = "weight"
    track_marginals: bool = False
    backend: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        if self.burnin_sweeps < 0:
            raise ValueError("burnin_sweeps must be >= 0")
        if self.sample_interval < 1 or self.sweeps % self.sample_interval:
            raise ValueError("sample_interval must be >= 1 and divide sweeps")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.k_init is not None and (self.k_init < 1 or (self.k_max is not None and self.k_init > self.k_max)):
            raise ValueError("need 1 <= k_init <= k_max")
        if self.q is not None and not 0.0 < self.q < 1.0:
            raise ValueError("q must lie in (0, 1)")
        if self.k_move not in K_MOVES:
            raise ValueError(f"k_move must be one of {K_MOVES}")
        if self.select not in SELECTIONS:
            raise ValueError(f"select must be one of {SELECTIONS}")

    def resolved(self, graph: Graph) -> "SamplerConfig":
        k_max = graph.n if self.k_max is None else self.k_max
        k_init = min(DEFAULT_K_INIT, k_max) if self.k_init is None else self.k_init
        if not 1 <= k_init <= k_max <= graph.n:
            raise ValueError(f"need 1 <= k_init <= k_max <= n={graph.n}")
        q = 1.0 / (graph.n + 1) if self.q is None else self.q
        return replace(self, k_max=k_max, k_init=k_init, q=q, backend=self.backend or DEFAULT_BACKEND)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["flavor"] = {"degree_corrected": self.flavor.degree_corrected}
        return out


@dataclass
class RunResult:
    run_index: int
    k_samples: np.ndarray
    log_weights: np.ndarray
    log_likelihoods: np.ndarray
    final_k: int
    final_g: np.ndarray
    marginal_k: int | None = None
    marginal_accumulator: np.ndarray | None = None
    marginal_reference: np.ndarray | None = field(default=None, repr=False)

    @property
    def avg_log_weight(self) -> float:
        return float(self.log_weights.mean())

    @property
    def avg_log_likelihood(self) -> float:
        return float(self.log_likelihoods.mean())

    @property
    def histogram(self) -> KHistogram:
        return KHistogram.from_samples(self.k_samples)


def run_rng(seed: int, run_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(run_index,))))


def initial_assignment(n: int, k_init: int, rng: np.random.Generator) -> np.ndarray:
    if k_init == 1:
        return np.zeros(n, dtype=np.int64)
    return rng.integers(0, k_init, size=n, dtype=np.int64)


def run(graph: Graph, config: SamplerConfig, run_index: int = 0) -> RunResult:
    """One chain: burn-in, then record k every ``sample_interval`` sweeps."""
    cfg = config.resolved(graph)
    rng = run_rng(cfg.seed, run_index)
    g0 = initial_assignment(graph.n, cfg.k_init, rng)
    chain = make_chain(
        graph,
        g0,
        cfg.k_init,
        k_max=cfg.k_max,
        flavor=cfg.flavor,
        q=cfg.q,
        backend=cfg.backend,
        swap_shrink=cfg.k_move == "swap",
    )
    if cfg.burnin_sweeps:
        chain.sweeps(rng, cfg.burnin_sweeps)
    count = cfg.sweeps // cfg.sample_interval

    if not cfg.track_marginals:
        ks, lw, ll = chain.sample(rng, count, cfg.sample_interval)
        return RunResult(run_index, ks, lw, ll, int(chain.k), chain.get_g())

    ks = np.empty(count, dtype=np.int64)
    lw = np.empty(count)
    ll = np.empty(count)
    accs: dict[int, MembershipAccumulator] = {}
    for t in range(count):
        kt, wt, lt = chain.sample(rng, 1, cfg.sample_interval)
        ks[t], lw[t], ll[t] = kt[0], wt[0], lt[0]
        acc = accs.get(ks[t])
        if acc is None:
            acc = accs[ks[t]] = MembershipAccumulator(graph.n, int(ks[t]))
        acc.add(chain.get_g())
    kmode = map_k(KHistogram.from_samples(ks))
    return RunResult(
        run_index,
        ks,
        lw,
        ll,
        int(chain.k),
        chain.get_g(),
        marginal_k=kmode,
        marginal_accumulator=accs[kmode].counts,
        marginal_reference=accs[kmode].reference,
    )


def _run_job(args):
    graph, config, index = args
    return run(graph, config, index)


def run_all(graph: Graph, config: SamplerConfig) -> list[RunResult]:
    """Every independent run, ordered by run index."""
    jobs = [(graph, config, r) for r in range(config.runs)]
    if config.workers > 1 and config.runs > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(_run_job, jobs))
    return [_run_job(j) for j in jobs]


def best_run(results: list[RunResult], select: str = "weight") -> RunResult:
    """Restart with the highest average log weight (``"weight"``) or average
    ``log P(A|g)`` (``"likelihood"``); earliest run index on ties."""
    if select == "weight":
        return max(results, key=lambda r: (r.avg_log_weight, -r.run_index))
    if select == "likelihood":
        return max(results, key=lambda r: (r.avg_log_likelihood, -r.run_index))
    raise ValueError(f"select must be one of {SELECTIONS}")


def multi_run(graph: Graph, config: SamplerConfig) -> RunResult:
    """Independent restarts; keep the best one according to ``config.select``."""
    return best_run(run_all(graph, config), config.select)


# -- single moves on a PartitionState ---------------------------------------
# Reference implementations built on the likelihood module. The chain
# kernels implement the same moves much faster; tests compare the two.


def heat_bath_conditional(state: PartitionState, i: int, p: float, flavor: ModelFlavor) -> np.ndarray:
    """``P(g_i = r | rest)`` for every group ``r``."""
    a = int(state.g[i])
    logp = np.array(
        [0.0 if r == a else log_weight_delta_move(state, i, r, p, flavor) for r in range(state.k)]
    )
    w = np.exp(logp - logp.max())
    return w / w.sum()


def heat_bath_step(state: PartitionState, p: float, flavor: ModelFlavor, rng: np.random.Generator) -> None:
    i = int(rng.integers(state.n))
    if state.k == 1:
        return
    probs = heat_bath_conditional(state, i, p, flavor)
    state.move_node(i, int(rng.choice(state.k, p=probs)))


def _move_label(state: PartitionState, a: int, b: int) -> None:
    order = [r for r in range(state.k) if r != a]
    order.insert(b, a)
    perm = np.empty(state.k, dtype=np.int64)
    perm[order] = np.arange(state.k)
    moved = state.relabel(perm)
    state.g, state.sizes, state.kappa, state.m_rs = moved.g, moved.sizes, moved.kappa, moved.m_rs


def k_step(state: PartitionState, rng: np.random.Generator, k_max: int | None = None, k_move: str = "exact") -> bool:
    """Propose ``k +/- 1`` with equal probability; returns whether the move was made."""
    n, k = state.n, state.k
    k_max = n if k_max is None else k_max
    if rng.random() < 0.5:
        if k >= k_max or math.log(rng.random()) >= log_k_ratio(k, n):
            return False
        state.change_k(+1)
        if k_move == "exact":
            _move_label(state, k, min(int(rng.random() * (k + 1)), k))
        return True
    if k == 1:
        return False
    if k_move == "exact":
        j = min(int(rng.random() * k), k - 1)
        if state.sizes[j] > 0:
            return False
        _move_label(state, j, k - 1)
    try:
        state.change_k(-1)
    except InfeasibleShrink:
        return False
    return True


def sweep(state: PartitionState, config: SamplerConfig, rng: np.random.Generator) -> None:
    cfg = config.resolved(state.graph)
    p = edge_density(state.graph)
    for _ in range(state.n + 1):
        if rng.random() < cfg.q:
            k_step(state, rng, cfg.k_max, cfg.k_move)
        else:
            heat_bath_step(state, p, cfg.flavor, rng)
