"""Command-line front end.

Subcommands: ``estimate``, ``generate``, ``bench-groups``, ``bench-detect``
and ``oracle``. JSON documents and CSV rows carry ``schema_version``; use
:func:`load_result` to read a JSON document back (it rejects other
versions). Exit status is 0 on success and 2 on bad input or flags.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from . import __version__
from .graph import GraphFormatError, format_edge_list, read_graph, write_edge_list
from .likelihood import ModelFlavor
from .oracle import TooLargeForEnumeration, exact_posterior_k
from .posterior import consensus_partition, map_k, marginal_memberships
from .sampler import K_MOVES, SamplerConfig, best_run, run_all
from .synth import (
    degree_params,
    detectability_threshold,
    generate_sbm,
    planted_params,
    split_mean_degree,
    write_planted,
)

SCHEMA_VERSION = 1

# heavier protocol used for small real networks: 10 runs of 50000 sweeps after 50000 burn-in
LONG_PROTOCOL = {"sweeps": 50_000, "burnin_sweeps": 50_000, "runs": 10}


class SchemaVersionError(ValueError):
    pass


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 already; route it through main() so tests can call it
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def load_result(source) -> dict:
    """Parse a JSON document written by this tool (path or file object)."""
    if hasattr(source, "read"):
        doc = json.load(source)
    else:
        with open(source) as fh:
            doc = json.load(fh)
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(f"expected schema_version {SCHEMA_VERSION}, got {version!r}")
    return doc


def _histogram_json(hist) -> dict:
    return {str(k): v for k, v in hist.items()}


def _emit(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _sampler_config(args, **overrides) -> SamplerConfig:
    values = dict(
        sweeps=args.sweeps,
        burnin_sweeps=args.burnin,
        runs=args.runs,
        seed=args.seed,
        sample_interval=args.sample_interval,
        k_max=getattr(args, "kmax", None),
        k_init=args.k_init,
        k_move=args.k_move,
        select=args.select,
        flavor=ModelFlavor(degree_corrected=not args.no_degree_correction),
        workers=args.workers,
    )
    if getattr(args, "long_protocol", False):
        values.update(LONG_PROTOCOL)
    values.update(overrides)
    try:
        return SamplerConfig(**values)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- estimate ---------------------------------------------------------------


def estimate(graph, config: SamplerConfig) -> dict:
    results = run_all(graph, config)
    best = best_run(results, config.select)
    hist = best.histogram
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "estimate",
        "version": __version__,
        "n": graph.n,
        "m": graph.m,
        "k_histogram": _histogram_json(hist),
        "map_k": map_k(hist),
        "best_run": best.run_index,
        "runs": [
            {
                "run": r.run_index,
                "avg_log_weight": r.avg_log_weight,
                "avg_log_likelihood": r.avg_log_likelihood,
                "map_k": map_k(r.histogram),
                "final_k": r.final_k,
            }
            for r in results
        ],
        "config": config.resolved(graph).to_dict(),
    }
    if config.track_marginals:
        marg = marginal_memberships(best.marginal_accumulator)
        part = consensus_partition(marg)
        doc["marginals"] = {
            "k": best.marginal_k,
            "nodes": {label: row.tolist() for label, row in zip(graph.labels, marg)},
        }
        doc["consensus"] = {label: int(r) for label, r in zip(graph.labels, part)}
    return doc


def cmd_estimate(args) -> int:
    graph = read_graph(args.input, args.format)
    config = _sampler_config(args, track_marginals=args.marginals)
    try:
        config.resolved(graph)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(json.dumps(estimate(graph, config), indent=2) + "\n", args.output)
    return 0


# -- generate ---------------------------------------------------------------


def cmd_generate(args) -> int:
    if args.k < 1 or args.group_size < 1 or args.c_in < 0 or args.c_out < 0:
        raise UsageError("need k >= 1, group size >= 1 and non-negative c_in, c_out")
    graph, planted = generate_sbm(planted_params(args.k, args.group_size, args.c_in, args.c_out), args.seed)
    if args.output in (None, "-"):
        sys.stdout.write(format_edge_list(graph))
        return 0
    write_edge_list(graph, args.output)
    write_planted(args.output + ".planted", graph, planted)
    return 0


# -- benchmarks -------------------------------------------------------------


def _network_seed(seed: int, *tags: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, *tags])


def _bench_job(job):
    params, net_seed, config = job
    graph, _ = generate_sbm(params, net_seed)
    best = best_run(run_all(graph, config), config.select)
    return best.histogram


def _fan_out(jobs, workers: int):
    # each job runs its restarts serially; parallelism is across networks
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_bench_job, jobs))
    return [_bench_job(j) for j in jobs]


def bench_groups(ks, networks: int, group_size: int, in_degree: float, out_degree: float, config: SamplerConfig):
    """``[(true_k, network, KHistogram)]`` for planted networks with ``k`` groups each."""
    serial = replace(config, workers=1)
    jobs, keys = [], []
    for k in ks:
        params = degree_params(k, group_size, in_degree, out_degree)
        for net in range(networks):
            jobs.append((params, _network_seed(config.seed, 1, k, net), serial))
            keys.append((k, net))
    hists = _fan_out(jobs, config.workers)
    return [(k, net, h) for (k, net), h in zip(keys, hists)]


def cmd_bench_groups(args) -> int:
    config = _sampler_config(args)
    rows = bench_groups(args.ks, args.networks, args.group_size, args.in_degree, args.out_degree, config)
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["schema_version", "true_k", "network", "k", "probability"])
    for true_k, net, hist in rows:
        for k, prob in hist.items():
            w.writerow([SCHEMA_VERSION, true_k, net, k, f"{prob:.6g}"])
    _emit(out.getvalue(), args.output)
    return 0


def bench_detect(gaps, networks: int, k: int, group_size: int, mean_degree: float, config: SamplerConfig):
    """``[(gap, successes, networks)]``; success is more than half of P(k|A) on the true ``k``."""
    serial = replace(config, workers=1)
    jobs = []
    for gi, gap in enumerate(gaps):
        c_in, c_out = split_mean_degree(k, mean_degree, gap)
        params = planted_params(k, group_size, c_in, c_out)
        for net in range(networks):
            jobs.append((params, _network_seed(config.seed, 2, gi, net), serial))
    hists = _fan_out(jobs, config.workers)
    out = []
    for gi, gap in enumerate(gaps):
        block = hists[gi * networks : (gi + 1) * networks]
        out.append((gap, sum(h.get(k, 0.0) > 0.5 for h in block), networks))
    return out


def cmd_bench_detect(args) -> int:
    config = _sampler_config(args)
    try:
        curve = bench_detect(args.gaps, args.networks, args.k, args.group_size, args.mean_degree, config)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    threshold = detectability_threshold(args.k, args.mean_degree)
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["schema_version", "gap", "successes", "networks", "success_fraction", "threshold"])
    for gap, wins, total in curve:
        w.writerow([SCHEMA_VERSION, gap, wins, total, f"{wins / total:.6g}", f"{threshold:.6g}"])
    _emit(out.getvalue(), args.output)
    return 0


# -- oracle -----------------------------------------------------------------


def cmd_oracle(args) -> int:
    graph = read_graph(args.input, args.format)
    flavor = ModelFlavor(degree_corrected=not args.no_degree_correction)
    if args.kmax < 1:
        raise UsageError("--kmax must be >= 1")
    try:
        hist = exact_posterior_k(graph, args.kmax, flavor)
    except TooLargeForEnumeration as exc:
        raise UsageError(str(exc)) from None
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "oracle",
        "version": __version__,
        "n": graph.n,
        "m": graph.m,
        "k_histogram": _histogram_json(hist),
        "map_k": map_k(hist),
        "config": {"k_max": args.kmax, "flavor": {"degree_corrected": flavor.degree_corrected}},
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.output)
    return 0


# -- argument parsing -------------------------------------------------------


def _sampler_flags(p, sweeps=2000, burnin=1000, runs=10):
    d = SamplerConfig()
    p.add_argument("--sweeps", type=int, default=sweeps, help="recorded sweeps per run")
    p.add_argument("--burnin", type=int, default=burnin, help="unrecorded sweeps before sampling")
    p.add_argument("--runs", type=int, default=runs, help="independent restarts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample-interval", type=int, default=1, help="sweeps between recorded samples")
    p.add_argument("--k-init", type=int, default=d.k_init, help="groups in the random initial assignment (default min(10, kmax))")
    p.add_argument("--k-move", choices=K_MOVES, default=d.k_move, help="group-count move rule")
    p.add_argument("--select", choices=("weight", "likelihood"), default=d.select, help="how the best restart is chosen")
    p.add_argument("--no-degree-correction", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output", "-o", help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sbmcount", description="Posterior over the number of groups in a network.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("estimate", help="sample P(k|A) for a network file")
    p.add_argument("input")
    p.add_argument("--format", choices=("edgelist", "gml"), help="input format (default: from suffix)")
    p.add_argument("--kmax", type=int, help="largest k allowed (default n)")
    p.add_argument("--marginals", action="store_true", help="also report group memberships")
    p.add_argument("--long-protocol", action="store_true", help="10 runs of 50000 sweeps after 50000 burn-in")
    _sampler_flags(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("generate", help="write a planted-partition network")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--group-size", type=int, default=250)
    p.add_argument("--c-in", type=float, required=True)
    p.add_argument("--c-out", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", help="edge list path; planted groups go to PATH.planted")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench-groups", help="P(k|A) for planted networks over a range of true k (CSV)")
    p.add_argument("--ks", type=int, nargs="+", default=[2, 3, 4, 5, 6, 7, 8, 9, 10])
    p.add_argument("--networks", type=int, default=1, help="networks per k")
    p.add_argument("--group-size", type=int, default=250)
    p.add_argument("--in-degree", type=float, default=16.0)
    p.add_argument("--out-degree", type=float, default=8.0, help="expected edges to each other group")
    _sampler_flags(p)
    p.set_defaults(func=cmd_bench_groups)

    p = sub.add_parser("bench-detect", help="success rate against c_in - c_out at fixed mean degree (CSV)")
    p.add_argument("--gaps", type=float, nargs="+", default=[4, 8, 12, 16, 20, 24, 30])
    p.add_argument("--networks", type=int, default=50, help="networks per gap")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--group-size", type=int, default=250)
    p.add_argument("--mean-degree", type=float, default=16.0)
    _sampler_flags(p)
    p.set_defaults(func=cmd_bench_detect)

    p = sub.add_parser("oracle", help="exact P(k|A) by enumeration for tiny networks (JSON)")
    p.add_argument("input")
    p.add_argument("--format", choices=("edgelist", "gml"))
    p.add_argument("--kmax", type=int, default=3)
    p.add_argument("--no-degree-correction", action="store_true")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except (OSError, GraphFormatError) as exc:
        print(f"sbmcount: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
