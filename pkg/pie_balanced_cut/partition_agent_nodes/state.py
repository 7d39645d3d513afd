from typing import List, Optional, TypedDict

import numpy as np

from pie_balanced_cut.graph import EdgeSet, Graph
from pie_balanced_cut.partition_agent_nodes.invariants import InvariantAuditor
from pie_balanced_cut.sdp import Embedding
from pie_balanced_cut.types import AlgoParams, BudgetState, IterationTrace


class PartitionState(TypedDict):
    """State for the partition workflow."""

    f: Graph
    graph: Graph
    params: AlgoParams
    d: float
    t: int
    T: int
    budgets: BudgetState
    initial_total: float
    embedding: Optional[Embedding]
    auditor: InvariantAuditor
    rng: np.random.Generator
    pieces: List[List[int]]
    trace: List[IterationTrace]
    degraded: bool
    fallback: bool
    rounding_cut: EdgeSet
    side_a: List[int]
