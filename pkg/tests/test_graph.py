import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbmcount.graph import (
    EmptyGraph,
    MalformedLine,
    edge_density,
    format_edge_list,
    from_edges,
    parse_edge_list,
    parse_gml,
    read_graph,
    write_edge_list,
)


def test_simple_path():
    g = parse_edge_list("1 2\n2 3")
    assert (g.n, g.m) == (3, 2)
    assert g.degrees.tolist() == [1, 2, 1]
    assert g.labels == ("1", "2", "3")


def test_duplicate_lines_accumulate():
    g = parse_edge_list("a b\na b")
    assert (g.n, g.m) == (2, 2)
    assert g.multiplicity(0, 1) == g.multiplicity(1, 0) == 2
    assert g.degrees.tolist() == [2, 2]


def test_self_loop_counts_twice_in_degree():
    g = parse_edge_list("x x")
    assert (g.n, g.m) == (1, 1)
    assert g.degrees.tolist() == [2]
    assert g.self_loops.tolist() == [1]


def test_comments_and_blank_lines():
    g = parse_edge_list("# header\n\n1 2\n  # indented comment\n2 3\n")
    assert (g.n, g.m) == (3, 2)


def test_nodes_header_allows_isolated_nodes():
    g = parse_edge_list("#nodes 5\n0 1\n")
    assert g.n == 5 and g.m == 1
    assert g.degrees.tolist() == [1, 1, 0, 0, 0]


def test_empty_input():
    with pytest.raises(EmptyGraph):
        parse_edge_list("# nothing\n\n")


def test_malformed_line_reports_line_number():
    with pytest.raises(MalformedLine) as err:
        parse_edge_list("1 2\n3\n")
    assert err.value.lineno == 2
    with pytest.raises(MalformedLine):
        parse_edge_list("1 2 3\n")


def test_edge_density_examples():
    assert edge_density(parse_edge_list("a b")) == 0.5
    g = from_edges(3, np.zeros(0, int), np.zeros(0, int))
    assert edge_density(g) == 0.0


def test_edge_density_karate():
    from sbmcount import datasets

    g = datasets.load("karate")
    assert (g.n, g.m) == (34, 78)
    assert edge_density(g) == pytest.approx(156 / 1156, abs=1e-12)


def test_gml_subset():
    text = """
    graph [
      directed 0
      node [ id 10 label "A" ]
      node [ id 11 label "B" ]
      node [ id 12 label "C" value 3 ]
      edge [ source 10 target 11 ]
      edge [ source 11 target 12 weight 2.5 ]
      edge [ source 12 target 12 ]
    ]
    """
    g = parse_gml(text)
    assert g.labels == ("A", "B", "C")
    assert g.m == 3
    assert g.degrees.tolist() == [1, 2, 3]


def test_read_graph_guesses_format(tmp_path):
    p = tmp_path / "g.gml"
    p.write_text('graph [ node [ id 0 ] node [ id 1 ] edge [ source 0 target 1 ] ]')
    assert read_graph(p).m == 1
    q = tmp_path / "g.txt"
    q.write_text("u v\n")
    assert read_graph(q).labels == ("u", "v")


edges = st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), min_size=1, max_size=30)


@settings(max_examples=60, deadline=None)
@given(edges)
def test_round_trip_and_degree_sum(pairs):
    text = "\n".join(f"n{u} n{v}" for u, v in pairs)
    g = parse_edge_list(text)
    assert int(g.degrees.sum()) == 2 * g.m == 2 * len(pairs)
    again = parse_edge_list(format_edge_list(g))
    assert again == g
    for i in range(g.n):
        for j, c in g.neighbors(i):
            assert g.multiplicity(j, i) == c >= 1


def test_round_trip_keeps_isolated_nodes(tmp_path):
    g = from_edges(4, [0], [1])
    path = tmp_path / "iso.txt"
    write_edge_list(g, path)
    back = read_graph(path)
    assert back == g and back.n == 4


def test_stream_input():
    g = parse_edge_list(io.StringIO("1 2\n"))
    assert g.m == 1


def test_equality_ignores_internal_numbering():
    a = parse_edge_list("x y\ny z\n")
    b = parse_edge_list("z y\ny x\n")
    assert a.labels != b.labels
    assert a == b
    assert a != parse_edge_list("x y\nx z\n")
