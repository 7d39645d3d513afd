import logging
from typing import Tuple

import numpy as np

from pie_balanced_cut.graph import EdgeSet, Graph, remove_edges
from pie_balanced_cut.partition_agent_nodes.invariants import (
    InvariantAuditor,
    check_budget_decrease,
    check_ledger_identity,
)
from pie_balanced_cut.partition_agent_nodes.state import PartitionState
from pie_balanced_cut.sdp import Embedding, edge_lengths
from pie_balanced_cut.types import STEP_LONG_EDGES, BudgetState

logger = logging.getLogger(__name__)


def remove_long_edges(
    budgets: BudgetState,
    g: Graph,
    emb: Embedding,
    threshold: float,
    eps: float,
    t: int,
    auditor: InvariantAuditor,
) -> Tuple[Graph, EdgeSet]:
    """
    Cut every edge whose squared length exceeds threshold + eps.

    Each cut edge adds one unit to both endpoint budgets and draws three units
    from the extra budget. When that would overdraw the extra budget nothing is
    cut: strict auditors raise, recording ones leave g as it is.

    Args:
        budgets: Budget state, updated in place
        g: Current active graph
        emb: SDP solution covering g
        threshold: Length threshold (delta/2)
        eps: SDP tolerance; edges within it of the threshold stay
        t: Iteration index, recorded in the ledger
        auditor: Invariant auditor

    Returns:
        Tuple[Graph, EdgeSet]: The graph without long edges, and the cut edges
    """
    lengths = edge_lengths(emb, g)
    long_rows = np.nonzero(lengths > threshold + eps)[0]
    cut = frozenset(tuple(int(x) for x in g.edge_array[i]) for i in long_rows)
    if not cut:
        check_ledger_identity(auditor, budgets, g, where=f"t={t} after step {STEP_LONG_EDGES}")
        return g, cut

    affordable = auditor.check(
        "extra_budget_nonnegative",
        budgets.extra_budget - 3 * len(cut) >= 0,
        f"t={t}: cutting {len(cut)} long edges overdraws extra budget {budgets.extra_budget:.1f}",
        {"t": t, "long_edges": len(cut), "extra_budget": budgets.extra_budget},
    )
    if not affordable:
        return g, frozenset()
    before = budgets.total(g.vertices)
    g_next = remove_edges(g, cut)
    for u, v in cut:
        budgets.budget[u] += 1
        budgets.budget[v] += 1
    budgets.extra_budget -= 3 * len(cut)
    budgets.record(t, STEP_LONG_EDGES, cut)
    check_budget_decrease(auditor, before, budgets.total(g_next.vertices), len(cut), STEP_LONG_EDGES, t)
    check_ledger_identity(auditor, budgets, g_next, where=f"t={t} after step {STEP_LONG_EDGES}")
    logger.info("t=%d: cut %d long edges", t, len(cut))
    return g_next, cut


def long_edges(state: PartitionState) -> PartitionState:
    """
    Step 2 of an iteration: remove edges that the embedding stretches.

    Args:
        state: The current state of the partition workflow

    Returns:
        PartitionState: The updated state without the long edges
    """
    params = state["params"]
    g, cut = remove_long_edges(
        state["budgets"],
        state["graph"],
        state["embedding"],
        threshold=params.delta / 2,
        eps=params.sdp.eps,
        t=state["t"],
        auditor=state["auditor"],
    )
    state["graph"] = g
    state["trace"][-1].long_cut = len(cut)
    return state
