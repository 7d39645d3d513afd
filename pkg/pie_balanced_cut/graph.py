"""
Undirected simple graphs with stable vertex ids, cuts and edge-list IO.

Graph values are immutable snapshots: every mutation returns a new Graph, so a
snapshot can be shared read-only between workers. Vertex ids are the dense ids
0..n_total-1 of the original instance and are never renumbered.
"""

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple, Union

import networkx as nx
import numpy as np
import scipy.sparse as sp

from pie_balanced_cut.errors import EdgeListFormatError, EdgeNotPresentError, UnknownVertexError

Edge = Tuple[int, int]
EdgeSet = FrozenSet[Edge]


def canonical_edge(u: int, v: int) -> Edge:
    """Return the (min, max) form of an undirected edge."""
    return (u, v) if u < v else (v, u)


def edge_set(edges: Iterable[Edge]) -> EdgeSet:
    return frozenset(canonical_edge(u, v) for u, v in edges)


@dataclass(frozen=True)
class Graph:
    """
    An immutable undirected simple graph on a subset of the ids 0..n_total-1.

    Attributes:
        n_total: Vertex count of the original instance
        vertices: Active vertex ids
        adjacency: Neighbor set of every active vertex
        edge_count: Number of undirected edges
    """

    n_total: int
    vertices: FrozenSet[int]
    adjacency: Mapping[int, FrozenSet[int]] = field(repr=False)
    edge_count: int

    @classmethod
    def from_edges(
        cls, n_total: int, edges: Iterable[Edge], vertices: Optional[Iterable[int]] = None
    ) -> "Graph":
        """
        Build a graph from an edge iterable.

        Args:
            n_total: Vertex count of the original instance
            edges: Undirected edges; duplicates in either orientation collapse
            vertices: Active vertex ids (defaults to 0..n_total-1)

        Returns:
            Graph: The new snapshot

        Raises:
            UnknownVertexError: If an endpoint is not an active vertex
            ValueError: On a self-loop
        """
        active = frozenset(range(n_total)) if vertices is None else frozenset(vertices)
        neighbors: Dict[int, set] = {v: set() for v in active}
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if u not in neighbors:
                raise UnknownVertexError(u)
            if v not in neighbors:
                raise UnknownVertexError(v)
            neighbors[u].add(v)
            neighbors[v].add(u)
        adjacency = {v: frozenset(ns) for v, ns in neighbors.items()}
        edge_count = sum(len(ns) for ns in adjacency.values()) // 2
        return cls(n_total=n_total, vertices=active, adjacency=adjacency, edge_count=edge_count)

    @classmethod
    def from_networkx(cls, nx_graph: nx.Graph, n_total: Optional[int] = None) -> "Graph":
        n = nx_graph.number_of_nodes() if n_total is None else n_total
        return cls.from_edges(n, nx_graph.edges(), vertices=nx_graph.nodes())

    def to_networkx(self) -> nx.Graph:
        nx_graph = nx.Graph()
        nx_graph.add_nodes_from(sorted(self.vertices))
        nx_graph.add_edges_from(self.edges())
        return nx_graph

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v: int) -> bool:
        return v in self.adjacency

    def neighbors(self, v: int) -> FrozenSet[int]:
        try:
            return self.adjacency[v]
        except KeyError:
            raise UnknownVertexError(v) from None

    def has_edge(self, u: int, v: int) -> bool:
        return u in self.adjacency and v in self.adjacency[u]

    def edges(self) -> List[Edge]:
        """All edges in canonical form, sorted."""
        return list(map(tuple, self.edge_array.tolist()))

    def edge_set(self) -> EdgeSet:
        return frozenset(self.edges())

    @cached_property
    def sorted_vertices(self) -> np.ndarray:
        return np.array(sorted(self.vertices), dtype=np.int64)

    @cached_property
    def index(self) -> Dict[int, int]:
        """Row index of each active vertex in `sorted_vertices` order."""
        return {int(v): i for i, v in enumerate(self.sorted_vertices)}

    @cached_property
    def edge_array(self) -> np.ndarray:
        """(m, 2) array of canonical edges in lexicographic order."""
        pairs = [(u, v) for u, ns in self.adjacency.items() for v in ns if u < v]
        if not pairs:
            return np.zeros((0, 2), dtype=np.int64)
        arr = np.array(pairs, dtype=np.int64)
        return arr[np.lexsort((arr[:, 1], arr[:, 0]))]

    @cached_property
    def indexed_edges(self) -> np.ndarray:
        """`edge_array` with vertex ids replaced by row indices."""
        if self.edge_count == 0:
            return np.zeros((0, 2), dtype=np.int64)
        return np.searchsorted(self.sorted_vertices, self.edge_array)

    def degree_array(self) -> np.ndarray:
        return np.array([len(self.adjacency[int(v)]) for v in self.sorted_vertices], dtype=np.int64)

    def laplacian(self) -> sp.csr_matrix:
        """Combinatorial Laplacian over `sorted_vertices` order."""
        size = len(self.vertices)
        rows, cols = self.indexed_edges[:, 0], self.indexed_edges[:, 1]
        data = np.ones(len(rows))
        adj = sp.coo_matrix((data, (rows, cols)), shape=(size, size))
        adj = (adj + adj.T).tocsr()
        deg = np.asarray(adj.sum(axis=1)).ravel()
        return (sp.diags(deg) - adj).tocsr()

    def induced_subgraph(self, keep: Iterable[int]) -> "Graph":
        keep_set = frozenset(keep)
        missing = keep_set - self.vertices
        if missing:
            raise UnknownVertexError(min(missing))
        adjacency = {v: self.adjacency[v] & keep_set for v in keep_set}
        edge_count = sum(len(ns) for ns in adjacency.values()) // 2
        return Graph(n_total=self.n_total, vertices=keep_set, adjacency=adjacency, edge_count=edge_count)


@dataclass(frozen=True)
class Cut:
    """A two-sided cut of a graph and the edges crossing it."""

    side_a: FrozenSet[int]
    side_b: FrozenSet[int]
    crossing_edges: Tuple[Edge, ...]

    @classmethod
    def from_side(cls, g: Graph, side: Iterable[int]) -> "Cut":
        side_a = frozenset(side)
        missing = side_a - g.vertices
        if missing:
            raise UnknownVertexError(min(missing))
        side_b = g.vertices - side_a
        return cls(side_a=side_a, side_b=side_b, crossing_edges=tuple(sorted(edge_boundary(g, side_a))))

    @property
    def cost(self) -> int:
        return len(self.crossing_edges)

    def min_side_fraction(self, n: int) -> float:
        return min(len(self.side_a), len(self.side_b)) / n if n else 0.0


def degree(g: Graph, v: int) -> int:
    """
    Degree of an active vertex.

    Raises:
        UnknownVertexError: If v is not active in g
    """
    return len(g.neighbors(v))


def edge_boundary(g: Graph, s: Iterable[int]) -> EdgeSet:
    """Edges of g with exactly one endpoint in s."""
    inside = frozenset(s)
    boundary = set()
    for u in inside:
        if u not in g.adjacency:
            raise UnknownVertexError(u)
        for v in g.adjacency[u]:
            if v not in inside:
                boundary.add(canonical_edge(u, v))
    return frozenset(boundary)


def remove_vertices(g: Graph, s: Iterable[int]) -> Tuple[Graph, EdgeSet]:
    """
    Delete a vertex set.

    Edges internal to s are removed but are not reported: only the boundary of s
    counts as cut.

    Returns:
        Tuple[Graph, EdgeSet]: The remaining graph and the boundary edges of s
    """
    removed = frozenset(s)
    if not removed:
        return g, frozenset()
    boundary = edge_boundary(g, removed)
    touched = {v for edge in boundary for v in edge if v not in removed}
    keep = g.vertices - removed
    adjacency = {v: (g.adjacency[v] - removed if v in touched else g.adjacency[v]) for v in keep}
    edge_count = sum(len(ns) for ns in adjacency.values()) // 2
    return Graph(n_total=g.n_total, vertices=keep, adjacency=adjacency, edge_count=edge_count), boundary


def remove_edges(g: Graph, e: Iterable[Edge]) -> Graph:
    """
    Delete an edge set, keeping every vertex.

    Raises:
        EdgeNotPresentError: If an edge is not in g (prevents double counting in budgets)
    """
    doomed = edge_set(e)
    if not doomed:
        return g
    drop: Dict[int, set] = {}
    for u, v in doomed:
        if not g.has_edge(u, v):
            raise EdgeNotPresentError(f"edge ({u}, {v}) is not in the graph")
        drop.setdefault(u, set()).add(v)
        drop.setdefault(v, set()).add(u)
    adjacency = dict(g.adjacency)
    for u, gone in drop.items():
        adjacency[u] = adjacency[u] - gone
    return Graph(
        n_total=g.n_total, vertices=g.vertices, adjacency=adjacency, edge_count=g.edge_count - len(doomed)
    )


def format_edge_list(g: Graph) -> str:
    lines = [f"{g.n_total} {g.edge_count}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    """
    Parse the `n m` header followed by m `u v` lines with 0 <= u < v < n.

    Raises:
        EdgeListFormatError: On any deviation from the format
    """
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise EdgeListFormatError("empty edge list")
    try:
        n, m = (int(tok) for tok in lines[0].split())
    except ValueError:
        raise EdgeListFormatError(f"bad header line: {lines[0]!r}") from None
    if len(lines) - 1 != m:
        raise EdgeListFormatError(f"header announces {m} edges, found {len(lines) - 1}")
    edges = []
    seen = set()
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListFormatError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListFormatError(f"line {lineno}: non-integer vertex id in {line!r}") from None
        if not 0 <= u < v < n:
            raise EdgeListFormatError(f"line {lineno}: need 0 <= u < v < n, got {u} {v}")
        if (u, v) in seen:
            raise EdgeListFormatError(f"line {lineno}: duplicate edge {u} {v}")
        seen.add((u, v))
        edges.append((u, v))
    return Graph.from_edges(n, edges)


def write_edge_list(g: Graph, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_edge_list(g))
    return path


def read_edge_list(path: Union[str, Path]) -> Graph:
    return parse_edge_list(Path(path).read_text())
