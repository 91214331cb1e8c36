"""Bayesian estimation of the number of groups in a network.

Markov chain Monte Carlo over the group count and the node assignment of a
(degree-corrected) Poisson stochastic block model, with all block-model
parameters integrated out.
"""

__version__ = "0.1.0"

from .graph import (
    EmptyGraph,
    Graph,
    GraphFormatError,
    MalformedLine,
    edge_density,
    from_edges,
    parse_edge_list,
    parse_gml,
    read_graph,
    write_edge_list,
)
from .kernels import BACKENDS, DEFAULT_BACKEND
from .likelihood import DEGREE_CORRECTED, PLAIN, ModelFlavor, log_weight
from .oracle import TooLargeForEnumeration, exact_marginal_memberships, exact_posterior_k
from .posterior import (
    KHistogram,
    align_partition,
    consensus_partition,
    map_k,
    marginal_memberships,
    total_variation,
)
from .sampler import RunResult, SamplerConfig, best_run, multi_run, run, run_all
from .state import InfeasibleShrink, InvalidAssignment, PartitionState
from .synth import SbmParams, detectability_threshold, generate_sbm, planted_partition

__all__ = [
    "BACKENDS",
    "DEFAULT_BACKEND",
    "DEGREE_CORRECTED",
    "EmptyGraph",
    "Graph",
    "GraphFormatError",
    "InfeasibleShrink",
    "InvalidAssignment",
    "KHistogram",
    "MalformedLine",
    "ModelFlavor",
    "PLAIN",
    "PartitionState",
    "RunResult",
    "SamplerConfig",
    "SbmParams",
    "TooLargeForEnumeration",
    "align_partition",
    "best_run",
    "consensus_partition",
    "detectability_threshold",
    "edge_density",
    "exact_marginal_memberships",
    "exact_posterior_k",
    "from_edges",
    "generate_sbm",
    "log_weight",
    "map_k",
    "marginal_memberships",
    "multi_run",
    "parse_edge_list",
    "parse_gml",
    "planted_partition",
    "read_graph",
    "run",
    "run_all",
    "total_variation",
    "write_edge_list",
]
