"""Time the compiled and pure-Python chain backends on the same workload.

Both backends are fed the same seed, so the script also confirms that
their trajectories agree. Example::

    python benchmarks/bench_backends.py --sizes 200 1000 --sweeps 20
"""

import argparse
import time

import numpy as np

from sbmcount.kernels import BACKENDS, make_chain
from sbmcount.synth import generate_sbm, planted_params


def time_backend(graph, backend, sweeps, k, seed):
    g0 = np.random.default_rng(seed).integers(0, k, graph.n)
    chain = make_chain(graph, g0, k, backend=backend)
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    ks, lw, _ = chain.sample(rng, sweeps, 1)
    return time.perf_counter() - start, ks, chain.get_g()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 1000, 4000])
    ap.add_argument("--mean-degree", type=float, default=16.0)
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--sweeps", type=int, default=10)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    names = sorted(BACKENDS)
    print(f"backends: {', '.join(names)}")
    print(f"{'n':>7} {'m':>8} " + " ".join(f"{b + ' s/sweep':>16}" for b in names) + f" {'speedup':>9} {'same':>5}")
    for n in args.sizes:
        gs = n // args.k
        c_out = args.mean_degree / 2
        c_in = args.mean_degree * args.k - (args.k - 1) * c_out
        graph, _ = generate_sbm(planted_params(args.k, gs, c_in, c_out), seed=args.seed)
        res = {b: time_backend(graph, b, args.sweeps, args.k, args.seed) for b in names}
        per = {b: res[b][0] / args.sweeps for b in names}
        same = all(
            np.array_equal(res[b][1], res[names[0]][1]) and np.array_equal(res[b][2], res[names[0]][2]) for b in names
        )
        speed = per["python"] / per["cython"] if "cython" in per else float("nan")
        cols = " ".join(f"{per[b]:16.5f}" for b in names)
        print(f"{graph.n:>7} {graph.m:>8} {cols} {speed:9.1f} {str(same):>5}")


if __name__ == "__main__":
    main()
