import logging
import math

from pie_balanced_cut import config
from pie_balanced_cut.errors import InvalidParameterError
from pie_balanced_cut.graph import Graph
from pie_balanced_cut.types import BudgetState

logger = logging.getLogger(__name__)

# float slack for comparisons like deg >= alpha*d where alpha*d is a product of decimals
_SLACK = 1e-9


def ceil_unit(x: float) -> int:
    """Round a budget quantity up to an integer, ignoring float noise."""
    return int(math.ceil(round(x, 9)))


def compute_d(noise_edges: int, n: int, C: float = config.C_EFF, log_base: float = config.LOG_BASE) -> float:
    """d = max(2|E_H|/n, C * log^3 n)."""
    if n <= 0:
        raise InvalidParameterError(f"n must be positive, got {n}")
    log_term = config.log(n, log_base) ** 3 if n > 1 else 0.0
    return max(2.0 * noise_edges / n, C * log_term)


def is_high_degree(degree: int, alpha: float, d: float) -> bool:
    return degree >= alpha * d - _SLACK


def allocate_budgets(f: Graph, d: float, alpha: float, beta: float, delta: float) -> BudgetState:
    """
    Initial budgets: ceil(beta*d) for vertices of degree >= alpha*d in F,
    ceil(alpha*d) for the rest. The extra budget is 3nd/delta.

    Raises:
        InvalidParameterError: If d is not positive
    """
    if d <= 0:
        raise InvalidParameterError(f"d must be positive, got {d}")
    high, low = ceil_unit(beta * d), ceil_unit(alpha * d)
    heavy = {int(v) for v in f.sorted_vertices if is_high_degree(len(f.adjacency[int(v)]), alpha, d)}
    budget = {int(v): (high if int(v) in heavy else low) for v in f.sorted_vertices}
    extra = 3.0 * f.n_total * d / delta
    logger.info(
        "budgets: %d high-degree at %d, %d low-degree at %d, extra %.1f",
        len(heavy),
        high,
        len(budget) - len(heavy),
        low,
        extra,
    )
    return BudgetState(budget=budget, initial=dict(budget), extra_budget=extra)
