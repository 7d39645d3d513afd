"""
Balanced rounding of an SDP embedding into a two-sided cut.

Candidate orders of the active vertices come from ball growing (distance to a
centre) and from random one-dimensional projections. Every prefix of every order
is a candidate side; the cheapest prefix whose larger side stays within
c * n_total wins.
"""

import logging
import math
from typing import List

import numpy as np

from pie_balanced_cut import config
from pie_balanced_cut.errors import RoundingError
from pie_balanced_cut.graph import Cut, Graph
from pie_balanced_cut.sdp import Embedding

logger = logging.getLogger(__name__)


def _prefix_costs(order: np.ndarray, edges: np.ndarray, size: int) -> np.ndarray:
    """cost[s] = number of edges with exactly one endpoint among the first s of `order`."""
    position = np.empty(size, dtype=np.int64)
    position[order] = np.arange(size)
    if len(edges) == 0:
        return np.zeros(size + 1, dtype=np.int64)
    pos = position[edges]
    first = pos.min(axis=1)
    last = pos.max(axis=1)
    opened = np.bincount(first, minlength=size)
    closed = np.bincount(last, minlength=size)
    # prefix of length s cuts an edge iff first < s <= last
    costs = np.concatenate([[0], np.cumsum(opened - closed)])
    return costs


def _candidate_orders(x: np.ndarray, rng: np.random.Generator) -> List[np.ndarray]:
    size = len(x)
    sq = np.einsum("ij,ij->i", x, x)
    dists = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (x @ x.T), 0.0)
    a, b = np.unravel_index(int(np.argmax(dists)), dists.shape)

    if size <= config.ROUNDING_ALL_SEEDS_LIMIT:
        centres = list(range(size))
    else:
        picked = rng.choice(size, size=min(size, config.ROUNDING_SEED_VERTICES), replace=False)
        centres = sorted({int(a), int(b), *(int(c) for c in picked)})

    orders = [np.argsort(dists[c], kind="stable") for c in centres]
    for direction in rng.standard_normal((config.ROUNDING_PROJECTIONS, x.shape[1])):
        orders.append(np.argsort(x @ direction, kind="stable"))
    return orders


def round_balanced(emb: Embedding, g: Graph, n_total: int, c_arv: float = config.C_ARV, seed: int = 0) -> Cut:
    """
    Split the active vertices of g into two sides using the embedding.

    Args:
        emb: SDP solution covering every active vertex of g
        g: Graph to cut
        n_total: Vertex count of the original instance; sides are bounded by c_arv * n_total
        c_arv: Balance constant, larger side <= c_arv * n_total
        seed: Seed for the sampled centres and projections

    Returns:
        Cut: The cheapest candidate; ties go to the more balanced split

    Raises:
        RoundingError: If no split of g's vertices satisfies the balance bound
    """
    size = len(g.vertices)
    if size == 0:
        return Cut(side_a=frozenset(), side_b=frozenset(), crossing_edges=())
    limit = math.floor(c_arv * n_total + 1e-9)
    low, high = size - limit, limit
    low = max(low, 0)
    high = min(high, size)
    if low > high:
        raise RoundingError(f"{size} vertices cannot be split with both sides <= {limit}")

    x = emb.points[emb.rows(g.sorted_vertices)]
    rng = np.random.default_rng(seed)
    edges = g.indexed_edges
    sizes = np.arange(low, high + 1)

    best = None
    for order in _candidate_orders(x, rng):
        costs = _prefix_costs(order, edges, size)[low : high + 1]
        imbalance = np.abs(2 * sizes - size)
        i = int(np.lexsort((imbalance, costs))[0])
        key = (int(costs[i]), int(imbalance[i]))
        if best is None or key < best[0]:
            best = (key, order[: sizes[i]])

    (cost, _), rows = best
    cut = Cut.from_side(g, (int(v) for v in g.sorted_vertices[rows]))
    logger.debug("rounding: %d vertices, cost %d, sides %d/%d", size, cost, len(cut.side_a), len(cut.side_b))
    return cut
