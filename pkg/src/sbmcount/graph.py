"""Undirected multigraphs with integer edge multiplicities.

Conventions follow the Poisson block model: ``a_ij`` is the number of edges
between distinct nodes ``i`` and ``j`` and a self-loop contributes ``2`` to
``a_ii``, so a node with one self-loop has degree 2 and ``m = sum(d) / 2``.
"""

from __future__ import annotations

import os
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, TextIO

import numpy as np


class GraphFormatError(ValueError):
    pass


class EmptyGraph(GraphFormatError):
    pass


class MalformedLine(GraphFormatError):
    def __init__(self, lineno: int, line: str):
        super().__init__(f"line {lineno}: expected two node tokens, got {line!r}")
        self.lineno = lineno


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable CSR multigraph.

    ``indptr``/``indices``/``mult`` hold every neighbor of every node with its
    multiplicity; a self-loop appears once in its node's row. Use
    :func:`from_edges` rather than the constructor.
    """

    labels: tuple[str, ...]
    indptr: np.ndarray
    indices: np.ndarray
    mult: np.ndarray
    _edges: tuple[np.ndarray, np.ndarray, np.ndarray] = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.labels)

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        u, v, c = self._edges
        np.add.at(deg, u, c)
        np.add.at(deg, v, c)
        return deg

    @cached_property
    def m(self) -> int:
        return int(self._edges[2].sum())

    @cached_property
    def self_loops(self) -> np.ndarray:
        """Self-loop multiplicity per node."""
        u, v, c = self._edges
        out = np.zeros(self.n, dtype=np.int64)
        loop = u == v
        out[u[loop]] = c[loop]
        return out

    @cached_property
    def loopless_csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """CSR arrays with self-loop entries removed (what the samplers iterate)."""
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        keep = rows != self.indices
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows[keep], minlength=self.n), out=indptr[1:])
        return indptr, self.indices[keep].copy(), self.mult[keep].copy()

    def neighbors(self, i: int) -> list[tuple[int, int]]:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return list(zip(self.indices[lo:hi].tolist(), self.mult[lo:hi].tolist()))

    def multiplicity(self, i: int, j: int) -> int:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        row = self.indices[lo:hi]
        pos = np.searchsorted(row, j)
        if pos < len(row) and row[pos] == j:
            return int(self.mult[lo + pos])
        return 0

    def edges(self) -> Iterable[tuple[int, int, int]]:
        """Yield ``(u, v, multiplicity)`` with ``u <= v`` in sorted order."""
        u, v, c = self._edges
        return zip(u.tolist(), v.tolist(), c.tolist())

    def __eq__(self, other: object) -> bool:
        # same labelled multigraph; internal node numbering is not compared
        if not isinstance(other, Graph):
            return NotImplemented
        return set(self.labels) == set(other.labels) and self._labelled_edges() == other._labelled_edges()

    def _labelled_edges(self) -> Counter:
        out: Counter = Counter()
        for u, v, c in self.edges():
            out[tuple(sorted((self.labels[u], self.labels[v])))] += c
        return out

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def from_edges(
    n: int,
    u: Sequence[int] | np.ndarray,
    v: Sequence[int] | np.ndarray,
    labels: Sequence[str] | None = None,
) -> Graph:
    """Build a graph from parallel endpoint arrays; repeated pairs accumulate."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    if u.shape != v.shape:
        raise ValueError("endpoint arrays differ in length")
    if len(u) and (min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= n):
        raise ValueError("endpoint out of range")
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    keys, counts = np.unique(lo * n + hi, return_counts=True)
    eu, ev, ec = keys // n, keys % n, counts.astype(np.int64)

    # both directions, self-loops once
    off = eu != ev
    rows = np.concatenate([eu, ev[off]])
    cols = np.concatenate([ev, eu[off]])
    vals = np.concatenate([ec, ec[off]])
    order = np.lexsort((cols, rows))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])

    if labels is None:
        labels = [str(i) for i in range(n)]
    if len(labels) != n:
        raise ValueError("label count does not match n")
    return Graph(
        labels=tuple(str(x) for x in labels),
        indptr=indptr,
        indices=cols[order],
        mult=vals[order],
        _edges=(eu, ev, ec),
    )


_NODES_HEADER = re.compile(r"#\s*nodes\s+(\d+)\s*$", re.IGNORECASE)


def parse_edge_list(text: str | TextIO) -> Graph:
    """Parse whitespace-separated node pairs, one edge per line.

    Lines starting with ``#`` are comments, except an optional ``#nodes N``
    header which declares nodes ``0..N-1`` up front (so isolated nodes can be
    expressed). Nodes are numbered in first-appearance order.
    """
    if not isinstance(text, str):
        text = text.read()
    index: dict[str, int] = {}
    labels: list[str] = []
    us: list[int] = []
    vs: list[int] = []

    def node(tok: str) -> int:
        i = index.get(tok)
        if i is None:
            i = index[tok] = len(labels)
            labels.append(tok)
        return i

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            hdr = _NODES_HEADER.match(line)
            if hdr and not labels:
                for i in range(int(hdr.group(1))):
                    node(str(i))
            continue
        toks = line.split()
        if len(toks) != 2:
            raise MalformedLine(lineno, raw)
        us.append(node(toks[0]))
        vs.append(node(toks[1]))

    if not labels:
        raise EmptyGraph("no nodes found in edge list")
    return from_edges(len(labels), us, vs, labels)


def format_edge_list(graph: Graph) -> str:
    """Canonical edge-list text; round-trips through :func:`parse_edge_list`."""
    lines = [f"#nodes {graph.n}"] if _needs_header(graph) else []
    for u, v, c in graph.edges():
        lines.extend([f"{graph.labels[u]} {graph.labels[v]}"] * c)
    return "\n".join(lines) + "\n"


def _needs_header(graph: Graph) -> bool:
    # the header only works with labels 0..n-1, and is only needed when first
    # appearance order would not reproduce the node numbering
    if graph.labels != tuple(str(i) for i in range(graph.n)):
        return False
    seen: list[int] = []
    mark = set()
    for u, v, c in graph.edges():
        for x in (u, v):
            if x not in mark:
                mark.add(x)
                seen.append(x)
    return seen != list(range(graph.n))


def write_edge_list(graph: Graph, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(format_edge_list(graph))


_GML_TOKEN = re.compile(r'"[^"]*"|\[|\]|[^\s\[\]]+')


def _gml_tokens(text: str) -> list[str]:
    return _GML_TOKEN.findall(text)


def _gml_block(tokens: list[str], pos: int) -> tuple[dict, int]:
    # tokens[pos] is just after '['; returns scalar fields and nested blocks
    out: dict = {}
    while pos < len(tokens):
        key = tokens[pos]
        if key == "]":
            return out, pos + 1
        if pos + 1 >= len(tokens):
            break
        val = tokens[pos + 1]
        if val == "[":
            sub, pos = _gml_block(tokens, pos + 2)
            out.setdefault(key, []).append(sub)
        else:
            out.setdefault(key, val.strip('"'))
            pos += 2
    raise GraphFormatError("unbalanced brackets in GML")


def parse_gml(text: str | TextIO) -> Graph:
    """Read the node id/label and edge source/target fields of a GML file.

    Everything else (weights, coordinates, the ``directed`` flag) is ignored.
    """
    if not isinstance(text, str):
        text = text.read()
    tokens = _gml_tokens(text)
    try:
        start = tokens.index("graph")
    except ValueError:
        raise GraphFormatError("no 'graph [' block in GML input") from None
    if start + 1 >= len(tokens) or tokens[start + 1] != "[":
        raise GraphFormatError("no 'graph [' block in GML input")
    body, _ = _gml_block(tokens, start + 2)

    nodes = body.get("node", [])
    if not nodes:
        raise EmptyGraph("GML graph has no nodes")
    index: dict[str, int] = {}
    labels: list[str] = []
    for nd in nodes:
        if "id" not in nd:
            raise GraphFormatError("GML node without id")
        index[nd["id"]] = len(labels)
        labels.append(nd.get("label", nd["id"]))
    if len(set(labels)) != len(labels):
        labels = [nd["id"] for nd in nodes]

    us, vs = [], []
    for ed in body.get("edge", []):
        try:
            us.append(index[ed["source"]])
            vs.append(index[ed["target"]])
        except KeyError as exc:
            raise GraphFormatError(f"GML edge refers to unknown node {exc}") from None
    return from_edges(len(labels), us, vs, labels)


def read_graph(path: str | os.PathLike, fmt: str | None = None) -> Graph:
    """Load a graph file; ``fmt`` is ``"edgelist"`` or ``"gml"``, else guessed from the suffix."""
    if fmt is None:
        fmt = "gml" if str(path).lower().endswith(".gml") else "edgelist"
    with open(path) as fh:
        text = fh.read()
    if fmt == "gml":
        return parse_gml(text)
    if fmt == "edgelist":
        return parse_edge_list(text)
    raise ValueError(f"unknown graph format {fmt!r}")


def edge_density(graph: Graph) -> float:
    """Empirical-Bayes prior scale ``p = 2m / n^2``."""
    return 2.0 * graph.m / graph.n**2
