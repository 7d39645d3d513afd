import tempfile
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pie_balanced_cut.errors import EdgeListFormatError, EdgeNotPresentError, UnknownVertexError
from pie_balanced_cut.graph import (
    Cut,
    Graph,
    degree,
    edge_boundary,
    parse_edge_list,
    read_edge_list,
    remove_edges,
    remove_vertices,
    write_edge_list,
)


@st.composite
def graphs(draw):
    n = draw(st.integers(min_value=1, max_value=12))
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=40))
    return Graph.from_edges(n, [(u, v) for u, v in pairs if u != v])


def test_from_edges_collapses_duplicates():
    g = Graph.from_edges(4, [(0, 1), (1, 0), (1, 2), (2, 1), (2, 3)])
    assert g.edge_count == 3, f"Expected 3 edges, got {g.edge_count}"
    assert g.edges() == [(0, 1), (1, 2), (2, 3)]
    assert degree(g, 1) == 2
    assert g.has_edge(2, 1) and not g.has_edge(0, 3)


def test_unknown_vertex_is_a_key_error():
    g = Graph.from_edges(3, [(0, 1)])
    with pytest.raises(UnknownVertexError):
        degree(g, 7)
    with pytest.raises(KeyError):
        g.neighbors(-1)


def test_self_loop_rejected():
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(1, 1)])


def test_remove_vertices_reports_boundary_only():
    # triangle 0-1-2 with a tail 2-3
    g = Graph.from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 3)])
    rest, boundary = remove_vertices(g, {0, 1})
    assert boundary == frozenset({(0, 2), (1, 2)}), "Internal edge (0, 1) must not be reported"
    assert rest.vertices == frozenset({2, 3})
    assert rest.edges() == [(2, 3)]
    assert rest.n_total == 4, "Original vertex count is kept"
    assert g.edge_count == 4, "Input graph is unchanged"


def test_remove_edges():
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    rest = remove_edges(g, [(2, 1)])
    assert rest.edges() == [(0, 1)]
    assert rest.vertices == g.vertices, "Removing edges keeps every vertex"
    with pytest.raises(EdgeNotPresentError):
        remove_edges(g, [(0, 2)])


def test_cut_from_side():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    cut = Cut.from_side(g, [0, 1])
    assert cut.cost == 1
    assert cut.crossing_edges == ((1, 2),)
    assert cut.min_side_fraction(4) == 0.5


@pytest.mark.parametrize(
    "text",
    [
        "",
        "3 x\n",
        "3 2\n0 1\n",
        "3 1\n1 0\n",
        "3 1\n0 3\n",
        "3 2\n0 1\n0 1\n",
        "3 1\n0 a\n",
        "3 1\n0 1 2\n",
    ],
)
def test_parse_edge_list_rejects_malformed_input(text):
    with pytest.raises(EdgeListFormatError):
        parse_edge_list(text)


def test_edge_list_file_round_trip():
    g = Graph.from_edges(6, [(0, 5), (1, 2), (3, 4)])
    with tempfile.TemporaryDirectory() as temp_dir:
        path = write_edge_list(g, Path(temp_dir) / "g.edges")
        assert path.read_text().splitlines()[0] == "6 3", "Header must be 'n m'"
        loaded = read_edge_list(path)
    assert loaded.n_total == 6
    assert loaded.edges() == g.edges()


@settings(max_examples=60, deadline=None)
@given(graphs(), st.data())
def test_boundary_and_removal_account_for_every_edge(g, data):
    side = data.draw(st.sets(st.sampled_from(sorted(g.vertices))))
    boundary = edge_boundary(g, side)
    other = g.vertices - side
    assert boundary == edge_boundary(g, other), "Boundary is symmetric"

    internal = sum(1 for u, v in g.edges() if u in side and v in side)
    rest, reported = remove_vertices(g, side)
    assert reported == boundary
    assert rest.edge_count == g.edge_count - len(boundary) - internal
    assert rest.vertices == other


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_degrees_and_laplacian(g):
    degrees = g.degree_array()
    assert degrees.sum() == 2 * g.edge_count
    lap = g.laplacian().toarray()
    assert np.allclose(lap.sum(axis=1), 0.0), "Laplacian rows sum to zero"
    assert np.allclose(np.diag(lap), degrees)
