"""
Runtime invariant checks for the partition workflow.

An InvariantAuditor either raises on the first failed hard check (strict mode,
the default for `cut`) or records pass/fail counts together with the first
counterexample (record mode, used by `audit` and `bench`). Soft checks never
raise; they are diagnostics that depend on SDP quality.
"""

import logging
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from pie_balanced_cut.errors import InvariantViolationError, PieceCoverError
from pie_balanced_cut.graph import Edge, Graph, canonical_edge
from pie_balanced_cut.types import BudgetState, CheckSummary, InvariantAuditReport

logger = logging.getLogger(__name__)


class InvariantAuditor:
    def __init__(self, strict: bool = True):
        self.strict = strict
        self.report = InvariantAuditReport()

    def check(
        self,
        name: str,
        ok: bool,
        message: str = "",
        context: Optional[Dict[str, Any]] = None,
        hard: bool = True,
    ) -> bool:
        """
        Record the outcome of one check.

        Args:
            name: Check identifier, used as the report key
            ok: Whether the check passed
            message: Human-readable description of a failure
            context: Counterexample details kept for the first failure
            hard: Hard checks raise in strict mode; soft ones only log

        Returns:
            bool: ok

        Raises:
            InvariantViolationError: On a failed hard check in strict mode
        """
        table = self.report.checks if hard else self.report.soft
        summary = table.setdefault(name, CheckSummary())
        if ok:
            summary.passed += 1
            return True
        summary.failed += 1
        if summary.first_failure is None:
            summary.first_failure = message
            summary.first_context = {k: str(v) for k, v in (context or {}).items()}
        if hard and self.strict:
            raise InvariantViolationError(name, message, context)
        logger.warning("%s check %s failed: %s", "hard" if hard else "soft", name, message)
        return False


def check_ledger_identity(auditor: InvariantAuditor, budgets: BudgetState, g: Graph, where: str) -> bool:
    """budget(u) == initial(u) + #ledger edges incident on u, for every active u."""
    incident: Dict[int, int] = {}
    for u, v in budgets.cut_edges():
        incident[u] = incident.get(u, 0) + 1
        incident[v] = incident.get(v, 0) + 1
    for u in g.sorted_vertices:
        u = int(u)
        expected = budgets.initial[u] + incident.get(u, 0)
        if budgets.budget[u] != expected:
            return auditor.check(
                "ledger_identity",
                False,
                f"{where}: budget({u}) = {budgets.budget[u]}, expected {expected}",
                {"vertex": u, "where": where},
            )
    return auditor.check("ledger_identity", True)


def check_budget_decrease(
    auditor: InvariantAuditor,
    before: float,
    after: float,
    cut_count: int,
    step: int,
    t: int,
    hard: bool = True,
) -> bool:
    """A step that cut k edges lowered the total budget by at least k."""
    return auditor.check(
        f"budget_decrease_step{step}",
        before - after >= cut_count - 1e-9,
        f"t={t} step {step}: total budget {before} -> {after} after cutting {cut_count} edges",
        {"t": t, "before": before, "after": after, "cut": cut_count},
        hard=hard,
    )


def check_damage_bound(
    auditor: InvariantAuditor,
    g: Graph,
    budgets: BudgetState,
    beta_d: int,
    rng: np.random.Generator,
    samples: int,
    t: int,
) -> bool:
    """
    budget(Y') <= 2|boundary(Y')| + 2*beta_d*|Y'| after damage control.

    Checked on every singleton and on `samples` random subsets of the remaining graph.
    """
    size = len(g.vertices)
    if size == 0:
        return auditor.check("damage_bound", True)
    ids = g.sorted_vertices
    budget = np.array([budgets.budget[int(v)] for v in ids], dtype=np.int64)
    degree = g.degree_array()
    singles = budget - 2 * degree - 2 * beta_d
    if (singles > 0).any():
        u = int(ids[np.argmax(singles > 0)])
        return auditor.check(
            "damage_bound",
            False,
            f"t={t}: singleton {{{u}}} has budget {budgets.budget[u]} > 2*deg + 2*beta_d",
            {"t": t, "vertex": u},
        )
    edges = g.indexed_edges
    for _ in range(samples):
        k = int(rng.integers(1, size + 1))
        mask = np.zeros(size, dtype=bool)
        mask[rng.choice(size, size=k, replace=False)] = True
        boundary = int(np.count_nonzero(mask[edges[:, 0]] != mask[edges[:, 1]])) if len(edges) else 0
        if budget[mask].sum() > 2 * boundary + 2 * beta_d * k:
            return auditor.check(
                "damage_bound",
                False,
                f"t={t}: random subset of size {k} breaks the damage-control bound",
                {"t": t, "subset": sorted(int(v) for v in ids[mask])[:20]},
            )
    return auditor.check("damage_bound", True)


def check_piece_cover(pieces: Sequence[Iterable[int]], n: int) -> None:
    """
    Raises:
        PieceCoverError: If the pieces overlap or miss a vertex of 0..n-1
    """
    seen = set()
    for piece in pieces:
        for v in piece:
            if v in seen:
                raise PieceCoverError(f"vertex {v} belongs to two pieces")
            seen.add(v)
    if seen != set(range(n)):
        missing = sorted(set(range(n)) - seen)
        extra = sorted(seen - set(range(n)))
        raise PieceCoverError(f"pieces miss {missing[:5]} and have unknown ids {extra[:5]}")


def check_edge_conservation(
    auditor: InvariantAuditor,
    f: Graph,
    pieces: Sequence[Iterable[int]],
    ledger_edges: List[Edge],
    rounding_edges: Iterable[Edge],
) -> bool:
    """Every edge of F is inside one piece, in the cut ledger, or cut by the final rounding."""
    ledger = [canonical_edge(u, v) for u, v in ledger_edges]
    if len(set(ledger)) != len(ledger):
        return auditor.check(
            "edge_conservation",
            False,
            f"{len(ledger) - len(set(ledger))} edges were cut twice",
        )
    owner = {v: i for i, piece in enumerate(pieces) for v in piece}
    accounted = set(ledger) | {canonical_edge(u, v) for u, v in rounding_edges}
    for u, v in f.edges():
        if owner.get(u) == owner.get(v) and u in owner:
            continue
        if (u, v) not in accounted:
            return auditor.check(
                "edge_conservation",
                False,
                f"edge ({u}, {v}) joins two pieces but was never cut",
                {"edge": (u, v)},
            )
    return auditor.check("edge_conservation", True)
