import logging
from dataclasses import replace
from typing import Optional

from pie_balanced_cut.graph import Graph
from pie_balanced_cut.partition_agent_nodes.state import PartitionState
from pie_balanced_cut.sdp import Embedding, sdp_cost, solve
from pie_balanced_cut.types import IterationTrace, SdpParams

logger = logging.getLogger(__name__)


def solve_with_retries(
    g: Graph, n_total: int, params: SdpParams, t: int, warm_start: Optional[Embedding] = None
) -> Embedding:
    """
    Solve the SDP on g, retrying with a fresh seed while the solver does not converge.

    Only the first attempt is warm-started. The last attempt is returned even
    when unconverged; callers mark the run as degraded.
    """
    emb = None
    for attempt in range(params.max_retries + 1):
        attempt_params = replace(params, seed=params.seed + 7919 * t + 104729 * attempt)
        emb = solve(g, n_total, attempt_params, warm_start=warm_start if attempt == 0 else None)
        if emb.converged:
            return emb
        logger.warning("t=%d: sdp attempt %d did not converge", t, attempt + 1)
    return emb


def solve_sdp(state: PartitionState) -> PartitionState:
    """
    Solve the SDP on the current active graph, warm-started from the previous embedding.

    Args:
        state: The current state of the partition workflow

    Returns:
        PartitionState: The updated state with the embedding and a new trace row
    """
    g = state["graph"]
    params = state["params"]
    t = state["t"]
    n = g.n_total
    previous = state["embedding"]
    warm = previous.restrict(g.sorted_vertices) if previous is not None else None

    emb = solve_with_retries(g, n, params.sdp, t, warm_start=warm)
    if not emb.converged:
        state["degraded"] = True

    cost = sdp_cost(emb, g)
    state["embedding"] = emb
    state["trace"].append(
        IterationTrace(
            t=t,
            sdp_cost=cost,
            sdp_converged=emb.converged,
            long_cut=0,
            heavy_components=0,
            heavy_cut=0,
            damage_y_size=0,
            damage_cut=0,
            total_budget=state["budgets"].total(g.vertices),
            extra_budget=state["budgets"].extra_budget,
            active_n=len(g.vertices),
            sdp_ratio=cost / (params.eta(t) * state["d"] * n),
        )
    )
    logger.info("t=%d: sdp cost %.3f on %d vertices (converged=%s)", t, cost, len(g.vertices), emb.converged)
    return state
