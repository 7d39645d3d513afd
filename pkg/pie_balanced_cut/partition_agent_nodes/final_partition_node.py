import logging
from typing import Iterable, List, Sequence, Tuple

from pie_balanced_cut.partition_agent_nodes.invariants import check_edge_conservation, check_piece_cover
from pie_balanced_cut.partition_agent_nodes.solve_sdp_node import solve_with_retries
from pie_balanced_cut.partition_agent_nodes.state import PartitionState
from pie_balanced_cut.rounding import round_balanced

logger = logging.getLogger(__name__)


def combine_pieces(pieces: Sequence[Iterable[int]]) -> Tuple[List[int], List[int]]:
    """
    Greedily place pieces, largest first, into the currently smaller side.

    When every piece has at most 3n/4 vertices both sides end with at least n/4.
    Ties in piece size go to the piece with the smaller minimum id; ties in side
    size go to side A.
    """
    ordered = sorted((sorted(p) for p in pieces if p), key=lambda p: (-len(p), p[0]))
    side_a: List[int] = []
    side_b: List[int] = []
    for piece in ordered:
        target = side_a if len(side_a) <= len(side_b) else side_b
        target.extend(piece)
    return sorted(side_a), sorted(side_b)


def final_rounding(state: PartitionState) -> PartitionState:
    """
    Split what is left after the last iteration with the balanced rounding.

    Args:
        state: The current state of the partition workflow

    Returns:
        PartitionState: The updated state with L' and R' added to the pieces
    """
    g = state["graph"]
    params = state["params"]
    if not g.vertices:
        state["rounding_cut"] = frozenset()
        return state

    previous = state["embedding"]
    warm = previous.restrict(g.sorted_vertices) if previous is not None else None
    emb = solve_with_retries(g, g.n_total, params.sdp, state["t"], warm_start=warm)
    if not emb.converged:
        state["degraded"] = True
    state["embedding"] = emb

    cut = round_balanced(emb, g, g.n_total, params.c_arv, seed=params.seed + state["t"])
    for side in (cut.side_a, cut.side_b):
        if side:
            state["pieces"].append(sorted(side))
    state["rounding_cut"] = frozenset(cut.crossing_edges)
    logger.info("final rounding: %d + %d vertices, cost %d", len(cut.side_a), len(cut.side_b), cut.cost)
    return state


def combine(state: PartitionState) -> PartitionState:
    """
    Combine every piece into two sides and run the end-of-run checks.

    Args:
        state: The current state of the partition workflow

    Returns:
        PartitionState: The updated state with side A of the final cut
    """
    f = state["f"]
    n = f.n_total
    params = state["params"]
    auditor = state["auditor"]
    budgets = state["budgets"]
    pieces = state["pieces"]
    hard = not state["degraded"]
    slack = 1.5 * params.sdp.eps * n

    check_piece_cover(pieces, n)
    side_a, _ = combine_pieces(pieces)
    state["side_a"] = side_a

    largest = max((len(p) for p in pieces), default=0)
    auditor.check(
        "piece_size",
        largest <= max(params.c_arv, 0.75) * n + slack,
        f"largest piece has {largest} of {n} vertices",
        {"largest": largest},
        hard=hard,
    )
    smaller = min(len(side_a), n - len(side_a))
    auditor.check(
        "final_balance",
        smaller >= n / 4 - slack,
        f"smaller side has {smaller} of {n} vertices",
        {"smaller": smaller},
        hard=hard,
    )

    ledger = budgets.cut_edges()
    check_edge_conservation(auditor, f, pieces, ledger, state["rounding_cut"])
    auditor.check(
        "total_cut_within_budget",
        len(ledger) <= state["initial_total"],
        f"{len(ledger)} ledger edges exceed the initial total budget {state['initial_total']:.1f}",
        hard=hard,
    )
    budget_bound = 1.5 * params.beta * state["d"] * n
    if state["initial_total"] <= budget_bound:
        auditor.check(
            "total_cut_bound",
            len(ledger) <= budget_bound,
            f"{len(ledger)} ledger edges exceed 1.5*beta*d*n = {budget_bound:.1f}",
            hard=hard,
        )

    long_total = sum(row.long_cut for row in state["trace"])
    auditor.check(
        "long_edges_total",
        long_total <= n * state["d"] / params.delta,
        f"{long_total} long edges cut over the run, bound {n * state['d'] / params.delta:.1f}",
        hard=hard,
    )
    costs = [row.sdp_cost for row in state["trace"]]
    tolerance = params.sdp.eps * max(1, f.edge_count)
    auditor.check(
        "sdp_cost_monotone",
        all(b <= a + tolerance for a, b in zip(costs, costs[1:])),
        f"sdp costs {costs} increase between iterations",
        hard=False,
    )
    ratio_bound = 8.0 * params.K
    auditor.check(
        "sdp_cost_ratio",
        all(row.sdp_ratio <= ratio_bound * (1.0 + params.sdp.eps) for row in state["trace"]),
        f"sdp cost exceeds 8K * eta_t * d * n (ratio bound {ratio_bound:.3g})",
        {"ratios": [round(row.sdp_ratio, 6) for row in state["trace"]], "bound": ratio_bound},
        hard=False,
    )
    # the per-iteration bounds need eta_t >= 1/D_n on every iteration that ran
    if state["trace"]:
        last_eta = params.eta(state["trace"][-1].t)
        auditor.check(
            "eta_above_inverse_D_n",
            last_eta >= 1.0 / params.D_n,
            f"eta_t = {last_eta:.4g} fell below 1/D_n = {1.0 / params.D_n:.4g}",
            {"T": len(state["trace"]), "D_n": params.D_n},
            hard=False,
        )
    return state
