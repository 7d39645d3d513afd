import logging
import math
import time
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from langgraph.graph import StateGraph

from pie_balanced_cut import config
from pie_balanced_cut.errors import InvalidParameterError
from pie_balanced_cut.graph import Cut, Graph
from pie_balanced_cut.partition_agent_nodes import (
    combine,
    damage_control_step,
    final_rounding,
    heavy_vertices,
    long_edges,
    solve_sdp,
)
from pie_balanced_cut.partition_agent_nodes.budgets import allocate_budgets
from pie_balanced_cut.partition_agent_nodes.invariants import InvariantAuditor
from pie_balanced_cut.partition_agent_nodes.state import PartitionState
from pie_balanced_cut.pie_generator import check_property3
from pie_balanced_cut.types import AlgoParams, PartitionResult, ResultRecord

logger = logging.getLogger(__name__)


def precheck(state: PartitionState) -> PartitionState:
    """
    Check that few vertices have low degree and allocate the initial budgets.

    Args:
        state: The initial state of the partition workflow

    Returns:
        PartitionState: The updated state, with `fallback` set when too many vertices have low degree
    """
    f = state["f"]
    params = state["params"]
    d = state["d"]
    if not check_property3(f, params.alpha, d):
        logger.warning("low-degree check fails for alpha=%.4g d=%.4g; using the degree cut", params.alpha, d)
        state["fallback"] = True
        return state
    budgets = allocate_budgets(f, d, params.alpha, params.beta, params.delta)
    state["budgets"] = budgets
    state["initial_total"] = budgets.total(f.vertices)
    return state


def degree_cut(state: PartitionState) -> PartitionState:
    """Replace the pipeline by the low-degree cut."""
    params = state["params"]
    result = simple_degree_cut(state["f"], params.alpha, state["d"], params)
    state["pieces"] = result.pieces
    state["side_a"] = sorted(result.cut.side_a)
    return state


def _after_precheck(state: PartitionState) -> str:
    if state["fallback"]:
        return "degree_cut"
    return "solve_sdp" if state["T"] > 0 and state["graph"].vertices else "final_rounding"


def _next_iteration(state: PartitionState) -> str:
    if state["t"] < state["T"] and state["graph"].vertices:
        return "solve_sdp"
    return "final_rounding"


def create_partition_workflow():
    """
    Create the workflow for one partition run.

    Returns:
        The compiled workflow graph
    """
    # Create the workflow
    workflow = StateGraph(PartitionState)

    # Add nodes
    workflow.add_node("precheck", precheck)
    workflow.add_node("degree_cut", degree_cut)
    workflow.add_node("solve_sdp", solve_sdp)
    workflow.add_node("long_edges", long_edges)
    workflow.add_node("heavy_vertices", heavy_vertices)
    workflow.add_node("damage_control", damage_control_step)
    workflow.add_node("final_rounding", final_rounding)
    workflow.add_node("combine", combine)

    # Add edges
    workflow.add_conditional_edges("precheck", _after_precheck, ["degree_cut", "solve_sdp", "final_rounding"])
    workflow.add_edge("solve_sdp", "long_edges")
    workflow.add_edge("long_edges", "heavy_vertices")
    workflow.add_edge("heavy_vertices", "damage_control")
    workflow.add_conditional_edges("damage_control", _next_iteration, ["solve_sdp", "final_rounding"])
    workflow.add_edge("final_rounding", "combine")

    # Set the entry point
    workflow.set_entry_point("precheck")

    # Set the exit points
    workflow.set_finish_point("combine")
    workflow.set_finish_point("degree_cut")

    # Compile the workflow
    return workflow.compile()


def _initial_state(f: Graph, params: AlgoParams, d: float, auditor: InvariantAuditor) -> PartitionState:
    return {
        "f": f,
        "graph": f,
        "params": params,
        "d": d,
        "t": 0,
        "T": params.iterations(f.n_total),
        "budgets": None,
        "initial_total": 0.0,
        "embedding": None,
        "auditor": auditor,
        "rng": np.random.default_rng(params.seed),
        "pieces": [],
        "trace": [],
        "degraded": False,
        "fallback": False,
        "rounding_cut": frozenset(),
        "side_a": [],
    }


def run(f: Graph, params: AlgoParams, d: float, auditor: Optional[InvariantAuditor] = None) -> PartitionResult:
    """
    Partition F with the main algorithm.

    Args:
        f: The public graph
        params: Algorithm constants and seed
        d: Degree scale d
        auditor: Invariant auditor; defaults to one matching params.strict

    Returns:
        PartitionResult: Pieces, the combined two-sided cut and the per-iteration trace

    Raises:
        InvalidParameterError: If d is not positive
        InvariantViolationError: On a failed hard check in strict mode
    """
    if d <= 0:
        raise InvalidParameterError(f"d must be positive, got {d}")
    auditor = auditor or InvariantAuditor(strict=params.strict)
    started = time.perf_counter()

    state = _initial_state(f, params, d, auditor)
    workflow = create_partition_workflow()
    final_state = workflow.invoke(state, config={"recursion_limit": 4 * state["T"] + 10})

    result = PartitionResult(
        pieces=final_state["pieces"],
        cut=Cut.from_side(f, final_state["side_a"]),
        trace=final_state["trace"],
        params=params,
        d=d,
        degraded=final_state["degraded"],
        fallback=final_state["fallback"],
        runtime_ms=(time.perf_counter() - started) * 1000.0,
        audit=auditor.report,
    )
    logger.info(
        "run d=%.3f: cost %d, balance %.3f, %d pieces%s",
        d,
        result.cut_cost,
        result.balance,
        len(result.pieces),
        " (degraded)" if result.degraded else "",
    )
    return result


def simple_degree_cut(f: Graph, alpha: float, d: float, params: Optional[AlgoParams] = None) -> PartitionResult:
    """
    Cut off the ceil(n / (3*alpha)) lowest-degree vertices; ties go to the lower id.

    Args:
        f: The public graph
        alpha: Degree constant alpha
        d: Degree scale d (recorded only)
        params: Constants recorded in the result; defaults to the ones matching alpha

    Returns:
        PartitionResult: Pieces [L', R'] with fallback=True
    """
    n = len(f.vertices)
    size = min(n, max(0, math.ceil(round(n / (3.0 * alpha), 9))))
    ids = f.sorted_vertices
    order = np.lexsort((ids, f.degree_array()))
    left = sorted(int(v) for v in ids[order[:size]])
    right = sorted(int(v) for v in ids[order[size:]])
    cut = Cut.from_side(f, left)
    return PartitionResult(
        pieces=[p for p in (left, right) if p],
        cut=cut,
        trace=[],
        params=params or AlgoParams(K=alpha / 10000.0),
        d=d,
        fallback=True,
    )


def blind_grid(f: Graph, params: AlgoParams) -> List[float]:
    """Geometric grid d_min * 2^j up to max(d_min, 8m/n), with d_min = C log^3 n."""
    n = max(f.n_total, 2)
    d_min = params.C * config.log(n) ** 3
    if d_min <= 0:
        d_min = 1.0
    top = max(d_min, 8.0 * f.edge_count / n)
    grid = []
    d = d_min
    while d <= top * (1 + 1e-12):
        grid.append(d)
        d *= 2.0
    return grid


def run_blind(f: Graph, params: AlgoParams) -> PartitionResult:
    """
    Run without knowing d: try every d on the blind grid and keep the best result.

    Balanced results (smaller side >= n/4) beat unbalanced ones; among those the
    lowest cut cost wins, ties going to the smaller d.

    Returns:
        PartitionResult: The chosen result with `blind_grid` set to the grid tried
    """
    grid = blind_grid(f, params)
    n = f.n_total
    best: Optional[PartitionResult] = None
    best_key = None
    for d in grid:
        result = run(f, params, d)
        balanced = min(len(result.cut.side_a), len(result.cut.side_b)) >= n / 4
        key = (not balanced, result.cut_cost)
        if best_key is None or key < best_key:
            best, best_key = result, key
        logger.info("blind grid d=%.3f: cost %d balanced=%s", d, result.cut_cost, balanced)
    best = replace(best, blind_grid=grid)
    return best


def write_result(result: PartitionResult, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(result.to_record().to_json(indent=2))
    return path


def load_result(path: Union[str, Path], f: Graph) -> PartitionResult:
    """
    Read a result.json written by `write_result` for the graph f.

    Raises:
        ValueError: If the recorded side A does not reproduce the recorded cost on f
    """
    record = ResultRecord.from_json(Path(path).read_text())
    cut = Cut.from_side(f, record.side_a)
    if cut.cost != record.cut_cost:
        raise ValueError(f"{path} records cost {record.cut_cost} but its side A cuts {cut.cost} edges of the graph")
    return PartitionResult(
        pieces=record.pieces,
        cut=cut,
        trace=record.iterations,
        params=record.params,
        d=record.d,
        degraded=record.degraded,
        fallback=record.fallback,
        runtime_ms=record.runtime_ms,
        blind_grid=record.blind_grid,
    )
