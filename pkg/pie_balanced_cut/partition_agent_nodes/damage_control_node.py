import logging
from typing import FrozenSet, Tuple

import numpy as np

from pie_balanced_cut import config
from pie_balanced_cut.graph import EdgeSet, Graph, remove_vertices
from pie_balanced_cut.maxflow import build_damage_network, check_budget_identity, damage_delta, min_cut
from pie_balanced_cut.partition_agent_nodes.budgets import ceil_unit
from pie_balanced_cut.partition_agent_nodes.invariants import (
    InvariantAuditor,
    check_budget_decrease,
    check_ledger_identity,
    check_damage_bound,
)
from pie_balanced_cut.partition_agent_nodes.state import PartitionState
from pie_balanced_cut.types import STEP_DAMAGE_CONTROL, BudgetState

logger = logging.getLogger(__name__)


def damage_control(
    budgets: BudgetState,
    g: Graph,
    beta_d: int,
    t: int,
    auditor: InvariantAuditor,
    rng: np.random.Generator,
    bound_samples: int = config.DAMAGE_BOUND_SUBSETS,
) -> Tuple[Graph, FrozenSet[int], EdgeSet]:
    """
    Remove the vertex set Y maximising Delta(Y) = budget(Y) - 2|E(Y, V\\Y)| - 2*beta_d*|Y|.

    Y is found as the inclusion-minimal source side of a minimum cut, and is
    only removed when Delta(Y) > 0. Surviving endpoints of cut edges gain one
    unit of budget each.

    Args:
        budgets: Budget state, updated in place
        g: Current active graph
        beta_d: Integer sink capacity unit, ceil(beta*d)
        t: Iteration index, recorded in the ledger
        auditor: Invariant auditor
        rng: Randomness for the random-subset spot check
        bound_samples: Number of random subsets checked after removal

    Returns:
        Tuple[Graph, FrozenSet[int], EdgeSet]: The remaining graph, the removed set and the cut edges
    """
    net = build_damage_network(g, budgets.budget, beta_d)
    result = min_cut(net)
    delta = damage_delta(g, budgets.budget, beta_d, result.y)
    check_budget_identity(net, result, delta)

    y: FrozenSet[int] = frozenset()
    cut: EdgeSet = frozenset()
    current = g
    if delta > 0:
        y = result.y
        before = budgets.total(g.vertices)
        current, cut = remove_vertices(g, y)
        for a, b in cut:
            budgets.budget[b if a in y else a] += 1
        budgets.record(t, STEP_DAMAGE_CONTROL, cut)
        check_budget_decrease(auditor, before, budgets.total(current.vertices), len(cut), STEP_DAMAGE_CONTROL, t)
        auditor.check(
            "damage_set_size",
            len(y) <= 0.75 * g.n_total,
            f"t={t}: damage control removed {len(y)} of {g.n_total} vertices",
            {"t": t, "size": len(y)},
        )
        logger.info("t=%d: damage control removed %d vertices (Delta=%d), cut %d edges", t, len(y), delta, len(cut))

    check_damage_bound(auditor, current, budgets, beta_d, rng, bound_samples, t)
    return current, y, cut


def damage_control_step(state: PartitionState) -> PartitionState:
    """
    Step 4 of an iteration, then advance to t + 1 on the remaining graph.

    Args:
        state: The current state of the partition workflow

    Returns:
        PartitionState: The updated state
    """
    params = state["params"]
    t = state["t"]
    budgets = state["budgets"]
    g, y, cut = damage_control(
        budgets,
        state["graph"],
        beta_d=ceil_unit(params.beta * state["d"]),
        t=t,
        auditor=state["auditor"],
        rng=state["rng"],
    )
    if y:
        state["pieces"].append(sorted(y))
    state["graph"] = g
    check_ledger_identity(state["auditor"], budgets, g, where=f"t={t} after step {STEP_DAMAGE_CONTROL}")
    state["auditor"].check(
        "extra_budget_nonnegative",
        budgets.extra_budget >= 0,
        f"t={t}: extra budget {budgets.extra_budget:.1f} is negative",
    )

    row = state["trace"][-1]
    row.damage_y_size = len(y)
    row.damage_cut = len(cut)
    row.total_budget = budgets.total(g.vertices)
    row.extra_budget = budgets.extra_budget
    row.active_n = len(g.vertices)
    state["t"] = t + 1
    return state
