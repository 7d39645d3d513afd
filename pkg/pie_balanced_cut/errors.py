"""Exceptions raised by the pie_balanced_cut package."""

from typing import Any, Dict, Optional


class PieCutError(Exception):
    """Base class for every error raised by this package."""


class UnknownVertexError(PieCutError, KeyError):
    """A vertex id is not active in the graph (or not embedded)."""

    def __init__(self, vertex: int, where: str = "graph"):
        self.vertex = vertex
        super().__init__(f"vertex {vertex} is not active in the {where}")

    def __str__(self) -> str:
        return self.args[0]


class EdgeNotPresentError(PieCutError, ValueError):
    """An edge scheduled for deletion is not in the graph."""


class EdgeListFormatError(PieCutError, ValueError):
    """An edge-list file does not follow the `n m` / `u v` format."""


class InvalidParameterError(PieCutError, ValueError):
    """An algorithm parameter such as d or n is out of range."""


class InfeasibleSpecError(PieCutError, ValueError):
    """Generator parameters cannot produce an instance."""


class OddVertexCountError(InfeasibleSpecError):
    """PIE instances need an even number of vertices."""


class SizeMismatchError(PieCutError, ValueError):
    """Two graphs that must share a vertex set do not."""


class NegativeBudgetError(PieCutError, ValueError):
    """A vertex budget handed to the flow network is negative."""


class RoundingError(PieCutError, RuntimeError):
    """No split of the embedded vertices satisfies the balance bound."""


class EigensolverError(PieCutError, RuntimeError):
    """The Laplacian eigensolver did not converge."""


class PieceCoverError(PieCutError, ValueError):
    """Pieces of a partition are not disjoint or do not cover the graph."""


class InvariantViolationError(PieCutError, AssertionError):
    """A checked invariant of the partition pipeline failed."""

    def __init__(self, check: str, message: str, context: Optional[Dict[str, Any]] = None):
        self.check = check
        self.context = context or {}
        super().__init__(f"[{check}] {message}")
