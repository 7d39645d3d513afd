import logging
from typing import List, Tuple

import numpy as np

from pie_balanced_cut.graph import EdgeSet, Graph, remove_vertices
from pie_balanced_cut.partition_agent_nodes.invariants import (
    InvariantAuditor,
    check_budget_decrease,
    check_ledger_identity,
)
from pie_balanced_cut.partition_agent_nodes.state import PartitionState
from pie_balanced_cut.sdp import Embedding
from pie_balanced_cut.types import STEP_HEAVY_VERTICES, BudgetState

logger = logging.getLogger(__name__)


def best_radius(g: Graph, dist: np.ndarray, low: float, high: float) -> float:
    """
    Radius r in [low, high] minimising the edge boundary of the ball {v : dist(v) <= r}.

    Only r = low and the distances falling in [low, high] are candidates; the
    boundary changes nowhere else. Ties go to the smaller radius.

    Args:
        g: Current active graph
        dist: Distance of every active vertex from the centre, in `sorted_vertices` order
        low: Smallest allowed radius
        high: Largest allowed radius
    """
    inside = dist[(dist >= low) & (dist <= high)]
    radii = np.unique(np.concatenate([[low], inside]))
    if g.edge_count == 0:
        return float(radii[0])
    ends = dist[g.indexed_edges]
    near = np.sort(ends.min(axis=1))
    far = np.sort(ends.max(axis=1))
    # an edge is on the boundary iff its near end is inside and its far end is not
    boundary = np.searchsorted(near, radii, side="right") - np.searchsorted(far, radii, side="right")
    return float(radii[int(np.argmin(boundary))])


def heavy_vertices_removal(
    budgets: BudgetState,
    g: Graph,
    emb: Embedding,
    eta_t: float,
    d: float,
    beta: float,
    delta: float,
    t: int,
    auditor: InvariantAuditor,
    eps: float,
    hard: bool = True,
) -> Tuple[Graph, List[List[int]], EdgeSet]:
    """
    Carve out balls around heavy vertices.

    Vertices are scanned in ascending id. A vertex u still active is heavy when
    the budget of its 3*delta ball reaches beta*eta_t*n*d, using the budgets
    as updated by earlier carvings of this step. The carved ball has the
    radius in [3*delta, 4*delta] with the smallest edge boundary; its boundary
    edges are cut and the surviving endpoint of each is charged one unit.

    Returns:
        Tuple[Graph, List[List[int]], EdgeSet]: The remaining graph, the removed components
        (each sorted) and the cut edges
    """
    n = g.n_total
    threshold = beta * eta_t * n * d
    ball_limit = 0.75 * n + 1.5 * eps * n
    current = g
    components: List[List[int]] = []
    cut = set()

    for u in g.sorted_vertices:
        u = int(u)
        if u not in current:
            continue
        ids = current.sorted_vertices
        dist = emb.distances_from(u, ids)
        ball = ids[dist <= 3 * delta]
        if budgets.of(int(v) for v in ball) < threshold:
            continue

        radius = best_radius(current, dist, 3 * delta, 4 * delta)
        component = sorted(int(v) for v in ids[dist <= radius])
        before = budgets.total(current.vertices)
        current, boundary = remove_vertices(current, component)
        members = set(component)
        for a, b in boundary:
            budgets.budget[b if a in members else a] += 1
        budgets.record(t, STEP_HEAVY_VERTICES, boundary)
        check_budget_decrease(
            auditor, before, budgets.total(current.vertices), len(boundary), STEP_HEAVY_VERTICES, t, hard=hard
        )
        auditor.check(
            "heavy_ball_size",
            len(component) <= ball_limit,
            f"t={t}: ball around {u} has {len(component)} vertices > {ball_limit:.1f}",
            {"t": t, "centre": u, "size": len(component), "radius": radius},
            hard=hard,
        )
        components.append(component)
        cut.update(boundary)
        logger.debug("t=%d: removed ball around %d (r=%.4f, |B|=%d, cut=%d)", t, u, radius, len(component), len(boundary))

    check_ledger_identity(auditor, budgets, current, where=f"t={t} after step {STEP_HEAVY_VERTICES}")
    if components:
        logger.info("t=%d: removed %d heavy components, cut %d edges", t, len(components), len(cut))
    return current, components, frozenset(cut)


def heavy_vertices(state: PartitionState) -> PartitionState:
    """
    Step 3 of an iteration: remove balls around heavy vertices.

    Args:
        state: The current state of the partition workflow

    Returns:
        PartitionState: The updated state with the remaining graph and the new pieces
    """
    params = state["params"]
    t = state["t"]
    g, components, cut = heavy_vertices_removal(
        state["budgets"],
        state["graph"],
        state["embedding"],
        eta_t=params.eta(t),
        d=state["d"],
        beta=params.beta,
        delta=params.delta,
        t=t,
        auditor=state["auditor"],
        eps=params.sdp.eps,
        hard=not state["degraded"],
    )
    state["graph"] = g
    state["pieces"].extend(components)
    state["trace"][-1].heavy_components = len(components)
    state["trace"][-1].heavy_cut = len(cut)
    return state
