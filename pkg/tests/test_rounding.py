import networkx as nx
import numpy as np
import pytest

from pie_balanced_cut.errors import RoundingError
from pie_balanced_cut.graph import Graph
from pie_balanced_cut.harness import exhaustive_balanced_cut
from pie_balanced_cut.rounding import round_balanced
from pie_balanced_cut.sdp import RADIUS, Embedding, intended_embedding, solve
from pie_balanced_cut.types import SdpParams


def _bridged_cliques() -> Graph:
    k4 = list(nx.complete_graph(4).edges())
    return Graph.from_edges(8, k4 + [(u + 4, v + 4) for u, v in k4] + [(0, 4)])


def test_intended_embedding_rounds_to_planted_cut():
    g = _bridged_cliques()
    emb = intended_embedding(g.vertices, range(4))
    cut = round_balanced(emb, g, n_total=8)
    assert cut.cost == 1
    assert {cut.side_a, cut.side_b} == {frozenset(range(4)), frozenset(range(4, 8))}


def test_sides_respect_the_balance_bound():
    rng = np.random.default_rng(7)
    g = Graph.from_networkx(nx.gnp_random_graph(30, 0.2, seed=7))
    points = rng.standard_normal((30, 6))
    points *= RADIUS / np.linalg.norm(points, axis=1, keepdims=True)
    emb = Embedding(ids=np.arange(30), points=points)
    for seed in range(3):
        cut = round_balanced(emb, g, n_total=30, c_arv=0.75, seed=seed)
        assert max(len(cut.side_a), len(cut.side_b)) <= 22
        assert cut.side_a | cut.side_b == g.vertices


def test_subgraph_sides_are_bounded_by_the_original_n():
    # 6 active vertices of an instance with n = 40: any split fits
    g = Graph.from_edges(40, [(0, 1), (1, 2), (3, 4)], vertices=range(6))
    emb = intended_embedding(range(6), [0, 1, 2])
    cut = round_balanced(emb, g, n_total=40)
    assert cut.cost == 0


def test_empty_graph_gives_empty_cut():
    g = Graph.from_edges(4, [], vertices=[])
    cut = round_balanced(intended_embedding([], []), g, n_total=4)
    assert cut.cost == 0 and not cut.side_a and not cut.side_b


def test_impossible_balance_raises():
    g = Graph.from_edges(4, [(0, 1)])
    with pytest.raises(RoundingError):
        round_balanced(intended_embedding(range(4), [0, 1]), g, n_total=4, c_arv=0.25)


def test_rounding_stays_within_three_times_the_optimum():
    rng = np.random.default_rng(11)
    worst = 0.0
    for i in range(50):
        n = 2 * int(rng.integers(4, 9))
        g = Graph.from_networkx(nx.gnp_random_graph(n, float(rng.uniform(0.25, 0.6)), seed=i))
        emb = solve(g, n_total=n, params=SdpParams(seed=i))
        cut = round_balanced(emb, g, n_total=n, c_arv=0.75, seed=i)
        best = exhaustive_balanced_cut(g, c=0.75)

        assert max(len(cut.side_a), len(cut.side_b)) <= 0.75 * n
        # an optimum of 0 is checked against one edge, the smallest nonzero cost
        ratio = cut.cost / max(best.cost, 1)
        worst = max(worst, ratio)
        assert ratio <= 3.0, f"Graph {i} (n={n}): rounding cost {cut.cost}, optimum {best.cost}"
    print(f"Worst rounding ratio over 50 graphs: {worst:.2f}")
