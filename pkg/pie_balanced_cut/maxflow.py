"""
Exact integral s-t min cut for the damage-control network.

Node layout: 0 is the source, the active vertex with row index i is node i + 1,
and len(vertices) + 1 is the sink. Every result is certified: capacity and
conservation are checked on the returned flow, the min-cut side is recomputed
as the residual reachability set and its capacity must equal the flow value.
"""

import logging
from dataclasses import dataclass
from typing import FrozenSet, Mapping

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import breadth_first_order, maximum_flow

from pie_balanced_cut import config
from pie_balanced_cut.errors import InvariantViolationError, NegativeBudgetError, UnknownVertexError
from pie_balanced_cut.graph import Graph

logger = logging.getLogger(__name__)

SOURCE = 0
_INT32_MAX = np.iinfo(np.int32).max


@dataclass(frozen=True, eq=False)
class FlowNetwork:
    """Arcs of a directed capacitated network; `vertices[i]` is node i + 1."""

    vertices: np.ndarray
    tails: np.ndarray
    heads: np.ndarray
    capacities: np.ndarray

    @property
    def sink(self) -> int:
        return len(self.vertices) + 1

    @property
    def num_nodes(self) -> int:
        return len(self.vertices) + 2

    def capacity_matrix(self) -> sp.csr_matrix:
        matrix = sp.csr_matrix(
            (self.capacities.astype(np.int32), (self.tails, self.heads)),
            shape=(self.num_nodes, self.num_nodes),
        )
        matrix.eliminate_zeros()
        return matrix


@dataclass(frozen=True)
class MinCutResult:
    """
    Attributes:
        y: Vertex ids on the source side (the inclusion-minimal minimum cut)
        cut_value: Capacity of the arcs leaving the source side
        flow_value: Value of the maximum flow
    """

    y: FrozenSet[int]
    cut_value: int
    flow_value: int


def build_damage_network(g: Graph, budgets: Mapping[int, int], beta_d: int) -> FlowNetwork:
    """
    s -> u with capacity budget(u), u -> t with capacity 2*beta_d, and both
    orientations of every edge with capacity 2.

    Raises:
        UnknownVertexError: If an active vertex has no budget
        NegativeBudgetError: If a budget is negative
        ValueError: If a capacity is not integral
    """
    vertices = g.sorted_vertices
    size = len(vertices)
    scale = config.FLOW_CAPACITY_SCALE
    for v in vertices:
        if int(v) not in budgets:
            raise UnknownVertexError(int(v), where="budget map")
    budget = np.array([budgets[int(v)] for v in vertices], dtype=float)
    if (budget < 0).any():
        bad = int(vertices[np.argmax(budget < 0)])
        raise NegativeBudgetError(f"vertex {bad} has budget {budgets[bad]}")
    raw = np.concatenate([budget, np.full(size, 2.0 * beta_d), np.full(2 * g.edge_count, 2.0)]) * scale
    caps = np.rint(raw).astype(np.int64)
    if not np.allclose(caps, raw):
        raise ValueError("flow capacities must be integral after scaling")
    if caps.size and caps.max() > _INT32_MAX:
        raise ValueError("flow capacities overflow int32")

    nodes = np.arange(1, size + 1, dtype=np.int64)
    edges = g.indexed_edges + 1
    tails = np.concatenate([np.full(size, SOURCE), nodes, edges[:, 0], edges[:, 1]])
    heads = np.concatenate([nodes, np.full(size, size + 1), edges[:, 1], edges[:, 0]])
    return FlowNetwork(vertices=vertices, tails=tails, heads=heads, capacities=caps)


def _certify(net: FlowNetwork, residual: sp.csr_matrix, flow: sp.csr_matrix, reach: np.ndarray, flow_value: int) -> int:
    if residual.nnz and residual.data.min() < 0:
        raise InvariantViolationError("maxflow_capacity", "flow exceeds capacity on some arc")
    net_out = np.asarray(flow.sum(axis=1)).ravel()
    inner = np.delete(net_out, [SOURCE, net.sink])
    if np.any(inner != 0):
        raise InvariantViolationError("maxflow_conservation", "flow is not conserved at an inner node")
    if net_out[SOURCE] != flow_value:
        raise InvariantViolationError("maxflow_value", f"source outflow {net_out[SOURCE]} != flow value {flow_value}")

    on_source_side = np.zeros(net.num_nodes, dtype=bool)
    on_source_side[reach] = True
    leaving = on_source_side[net.tails] & ~on_source_side[net.heads]
    cut_value = int(net.capacities[leaving].sum())
    if cut_value != flow_value:
        raise InvariantViolationError(
            "maxflow_cut_value",
            f"cut capacity {cut_value} != flow value {flow_value}",
            {"cut_value": cut_value, "flow_value": flow_value},
        )
    return cut_value


def min_cut(net: FlowNetwork) -> MinCutResult:
    """
    Minimum s-t cut with the inclusion-minimal source side.

    Raises:
        InvariantViolationError: If the returned flow fails certification
    """
    if len(net.vertices) == 0:
        return MinCutResult(y=frozenset(), cut_value=0, flow_value=0)
    capacity = net.capacity_matrix()
    result = maximum_flow(capacity, SOURCE, net.sink, method="dinic")
    flow = result.flow.tocsr()
    residual = (capacity - flow).tocsr()
    positive = residual.copy()
    positive.data[positive.data < 0] = 0
    positive.eliminate_zeros()
    reach = breadth_first_order(positive, SOURCE, directed=True, return_predecessors=False)
    cut_value = _certify(net, residual, flow, reach, int(result.flow_value))

    rows = np.array([r - 1 for r in reach if 0 < r < net.sink], dtype=np.int64)
    y = frozenset(int(v) for v in net.vertices[rows]) if len(rows) else frozenset()
    logger.debug("min cut: flow=%d |Y|=%d", result.flow_value, len(y))
    return MinCutResult(y=y, cut_value=cut_value, flow_value=int(result.flow_value))


def damage_delta(g: Graph, budgets: Mapping[int, int], beta_d: int, y) -> int:
    """Delta(Y) = budget(Y) - 2|E(Y, V \\ Y)| - 2*beta_d*|Y|."""
    y = frozenset(y)
    boundary = sum(1 for u in y for v in g.neighbors(u) if v not in y)
    return sum(budgets[u] for u in y) - 2 * boundary - 2 * beta_d * len(y)


def check_budget_identity(net: FlowNetwork, cut: MinCutResult, delta: int) -> None:
    """budget(V) - cut_value must equal Delta(Y) for the returned side."""
    scale = config.FLOW_CAPACITY_SCALE
    size = len(net.vertices)
    total = int(net.capacities[:size].sum())
    if total - cut.cut_value != delta * scale:
        raise InvariantViolationError(
            "maxflow_budget_identity",
            f"budget(V) - cut = {total - cut.cut_value} but Delta(Y) = {delta * scale}",
            {"budget": total, "cut_value": cut.cut_value, "delta": delta},
        )
