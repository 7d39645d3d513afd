from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pie_balanced_cut.errors import NegativeBudgetError, UnknownVertexError
from pie_balanced_cut.graph import Graph
from pie_balanced_cut.maxflow import (
    build_damage_network,
    check_budget_identity,
    damage_delta,
    min_cut,
)


@st.composite
def budgeted_graphs(draw):
    n = draw(st.integers(min_value=1, max_value=12))
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=40))
    g = Graph.from_edges(n, [(u, v) for u, v in pairs if u != v])
    budgets = {v: draw(st.integers(min_value=0, max_value=40)) for v in range(n)}
    # 2*beta_d in {4, 10}
    beta_d = draw(st.sampled_from([2, 5]))
    return g, budgets, beta_d


def _all_deltas(g: Graph, budgets, beta_d: int):
    """Delta of every subset of g's vertices, one row of `bits` per subset."""
    ids = g.sorted_vertices
    size = len(ids)
    masks = np.arange(2**size, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(size)) & 1).astype(bool)
    budget = np.array([budgets[int(v)] for v in ids], dtype=np.int64)
    edges = g.indexed_edges
    boundary = (bits[:, edges[:, 0]] != bits[:, edges[:, 1]]).sum(axis=1) if len(edges) else 0
    return bits, bits @ budget - 2 * boundary - 2 * beta_d * bits.sum(axis=1)


@settings(max_examples=100, deadline=None)
@given(budgeted_graphs())
def test_min_cut_maximises_delta(case):
    g, budgets, beta_d = case
    net = build_damage_network(g, budgets, beta_d)
    result = min_cut(net)

    bits, deltas = _all_deltas(g, budgets, beta_d)
    best = int(deltas.max())
    y_delta = damage_delta(g, budgets, beta_d, result.y)
    assert y_delta == best, f"Y={sorted(result.y)} has Delta {y_delta}, best is {best}"

    y_mask = np.isin(g.sorted_vertices, sorted(result.y))
    maximisers = bits[deltas == best]
    assert (maximisers[:, y_mask]).all(), "Y must be the inclusion-minimal maximiser"

    assert result.cut_value == result.flow_value
    check_budget_identity(net, result, y_delta)


def _all_subsets(vertices):
    ordered = sorted(vertices)
    for k in range(len(ordered) + 1):
        yield from (frozenset(c) for c in combinations(ordered, k))


def test_delta_table_matches_damage_delta():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)])
    budgets = {0: 12, 1: 0, 2: 7, 3: 30, 4: 3}
    bits, deltas = _all_deltas(g, budgets, beta_d=2)
    expected = {s: damage_delta(g, budgets, 2, s) for s in _all_subsets(g.vertices)}
    for row, value in zip(bits, deltas):
        assert expected[frozenset(int(v) for v in g.sorted_vertices[row])] == value


def test_isolated_rich_vertex_is_removed():
    g = Graph.from_edges(3, [(1, 2)])
    result = min_cut(build_damage_network(g, {0: 10, 1: 1, 2: 1}, beta_d=3))
    assert result.y == frozenset({0})
    assert damage_delta(g, {0: 10, 1: 1, 2: 1}, 3, result.y) == 4


def test_poor_vertices_stay():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    result = min_cut(build_damage_network(g, {v: 2 for v in range(4)}, beta_d=1))
    assert result.y == frozenset()
    assert result.flow_value == 8


def test_empty_graph():
    g = Graph.from_edges(3, [], vertices=[])
    result = min_cut(build_damage_network(g, {}, beta_d=1))
    assert result.y == frozenset() and result.cut_value == 0


def test_network_rejects_bad_budgets():
    g = Graph.from_edges(2, [(0, 1)])
    with pytest.raises(NegativeBudgetError):
        build_damage_network(g, {0: -1, 1: 0}, beta_d=1)
    with pytest.raises(UnknownVertexError):
        build_damage_network(g, {0: 1}, beta_d=1)
