"""
PIE instance generation: planted graph G, noise graph H, a uniform side-preserving
bijection pi, and the composed public graph F = G + pi(H).

Vertex layout: generators build G and H on canonical ids where the left side is
0..n/2-1. The composed graph is then relabeled by a uniform permutation sigma so
that the public ids carry no information about the planted cut; all ground truth
is stored in public ids.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Tuple

import networkx as nx
import numpy as np

from pie_balanced_cut import config
from pie_balanced_cut.errors import InfeasibleSpecError, OddVertexCountError, SizeMismatchError
from pie_balanced_cut.graph import EdgeSet, Graph, edge_set, read_edge_list
from pie_balanced_cut.types import GeneratorSpec

logger = logging.getLogger(__name__)

# float slack for degree thresholds such as alpha*d
_SLACK = 1e-9


@dataclass
class PlantedInstance:
    """The public graph F plus the hidden ground truth it was built from."""

    f: Graph
    left: FrozenSet[int]
    right: FrozenSet[int]
    planted_edges: EdgeSet
    noise_edges: EdgeSet
    overlap_edges: EdgeSet
    pi: np.ndarray
    seed: int
    generator_params: GeneratorSpec

    @property
    def n(self) -> int:
        return self.f.n_total

    @property
    def overlap_count(self) -> int:
        return len(self.overlap_edges)

    @property
    def noise_image(self) -> EdgeSet:
        """pi(E_H) before collapsing the edges it shares with E_G."""
        return self.noise_edges | self.overlap_edges

    def planted_degrees(self) -> Dict[int, int]:
        return _degrees(self.n, self.planted_edges)

    def noise_degrees(self) -> Dict[int, int]:
        """deg(v, H) carried to the public id of v through pi."""
        return _degrees(self.n, self.noise_image)


@dataclass
class Property4Report:
    """Vertices whose weighted noise neighbourhood breaks the noise-weight bound."""

    violations: Dict[int, Tuple[float, float]] = field(default_factory=dict)
    checked: int = 0

    @property
    def passed(self) -> bool:
        return not self.violations


def _degrees(n: int, edges: EdgeSet) -> Dict[int, int]:
    deg = {v: 0 for v in range(n)}
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    return deg


def _child_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**31 - 1))


def sample_pi(n: int, seed: int) -> np.ndarray:
    """
    Draw a uniform bijection that maps each side onto itself.

    Args:
        n: Vertex count (even); the left side of both graphs is 0..n/2-1
        seed: Random seed; equal seeds give equal bijections

    Returns:
        np.ndarray: pi[x] is the image of H-vertex x

    Raises:
        OddVertexCountError: If n is odd
    """
    if n % 2:
        raise OddVertexCountError(f"n must be even, got {n}")
    half = n // 2
    rng = np.random.default_rng(seed)
    pi = np.empty(n, dtype=np.int64)
    pi[:half] = rng.permutation(half)
    pi[half:] = half + rng.permutation(half)
    return pi


def relabel(g: Graph, sigma: np.ndarray) -> Graph:
    """Rename vertex v to sigma[v]."""
    return Graph.from_edges(
        g.n_total,
        ((int(sigma[u]), int(sigma[v])) for u, v in g.edges()),
        vertices=(int(sigma[v]) for v in g.vertices),
    )


def compose(g: Graph, h: Graph, pi: np.ndarray) -> Graph:
    """
    F = G + pi(H): the set union of E_G and the image of E_H under pi.

    Raises:
        SizeMismatchError: If g, h and pi do not share a vertex count
    """
    if g.n_total != h.n_total or len(pi) != g.n_total:
        raise SizeMismatchError(f"cannot compose graphs on {g.n_total} and {h.n_total} vertices (|pi|={len(pi)})")
    image = ((int(pi[u]), int(pi[v])) for u, v in h.edges())
    return Graph.from_edges(g.n_total, list(g.edges()) + list(image))


def _grid_shape(size: int) -> Tuple[int, int]:
    rows = max(r for r in range(1, int(math.isqrt(size)) + 1) if size % r == 0)
    return rows, size // rows


def _side_graph(spec: GeneratorSpec, seed: int) -> nx.Graph:
    half = spec.n // 2
    if spec.g_model == "two-random-regular":
        return nx.random_regular_graph(spec.g_degree, half, seed=seed)
    if spec.g_model == "two-grids":
        rows, cols = _grid_shape(half)
        return nx.convert_node_labels_to_integers(nx.grid_2d_graph(rows, cols))
    return nx.complete_graph(half)


def build_planted(spec: GeneratorSpec, rng: np.random.Generator) -> Graph:
    """Planted graph G on canonical ids: no edge between 0..n/2-1 and n/2..n-1."""
    half = spec.n // 2
    if spec.g_model == "file":
        g = read_edge_list(spec.g_file)
        if g.n_total != spec.n:
            raise SizeMismatchError(f"{spec.g_file} has {g.n_total} vertices, expected {spec.n}")
        crossing = [(u, v) for u, v in g.edges() if (u < half) != (v < half)]
        if crossing:
            raise InfeasibleSpecError(f"{spec.g_file} has {len(crossing)} edges across the planted cut")
        return g
    left = _side_graph(spec, _child_seed(rng))
    right = _side_graph(spec, _child_seed(rng))
    edges = list(left.edges()) + [(u + half, v + half) for u, v in right.edges()]
    return Graph.from_edges(spec.n, edges)


def build_noise(spec: GeneratorSpec, rng: np.random.Generator) -> Graph:
    """Noise graph H on canonical ids, drawn from the selected model."""
    half = spec.n // 2
    seed = _child_seed(rng)
    if spec.h_model == "erdos-renyi":
        h = nx.fast_gnp_random_graph(spec.n, spec.edge_probability(), seed=seed)
    elif spec.h_model == "bipartite-crossing":
        h = nx.bipartite.random_graph(half, half, spec.h_q or 0.0, seed=seed)
    elif spec.h_model == "preferential-attachment":
        h = nx.barabasi_albert_graph(spec.n, spec.h_m, seed=seed)
    else:
        g = read_edge_list(spec.h_file)
        if g.n_total != spec.n:
            raise SizeMismatchError(f"{spec.h_file} has {g.n_total} vertices, expected {spec.n}")
        return g
    return Graph.from_networkx(h, n_total=spec.n)


def generate(spec: GeneratorSpec) -> PlantedInstance:
    """
    Draw a PIE instance.

    Args:
        spec: Generator menu choice, parameters and seed

    Returns:
        PlantedInstance: F in public ids together with (L, R), E_G, pi(E_H) and pi

    Raises:
        InfeasibleSpecError: If `spec` is invalid (odd n, regular degree >= n/2, ...)
    """
    spec.validate()
    n, half = spec.n, spec.n // 2
    # separate streams: a consumer seeding default_rng(spec.seed) must not see sigma
    graph_stream, relabel_stream = np.random.SeedSequence(spec.seed).spawn(2)
    rng = np.random.default_rng(graph_stream)

    g = build_planted(spec, rng)
    h = build_noise(spec, rng)
    pi = sample_pi(n, _child_seed(rng))
    sigma = np.random.default_rng(relabel_stream).permutation(n)

    planted = edge_set((int(sigma[u]), int(sigma[v])) for u, v in g.edges())
    image = edge_set((int(sigma[pi[u]]), int(sigma[pi[v]])) for u, v in h.edges())
    f = relabel(compose(g, h, pi), sigma)
    left = frozenset(int(sigma[v]) for v in range(half))
    right = frozenset(range(n)) - left

    for u, v in planted:
        if (u in left) != (v in left):
            raise InfeasibleSpecError(f"planted edge ({u}, {v}) crosses the planted cut")

    overlap = planted & image
    instance = PlantedInstance(
        f=f,
        left=left,
        right=right,
        planted_edges=planted,
        noise_edges=image - overlap,
        overlap_edges=overlap,
        pi=sigma[pi],
        seed=spec.seed,
        generator_params=spec,
    )
    logger.info(
        "generated n=%d |E_G|=%d |pi(E_H)|=%d overlap=%d |E_F|=%d",
        n,
        len(planted),
        len(image),
        len(overlap),
        f.edge_count,
    )
    return instance


def crossing_noise(inst: PlantedInstance) -> int:
    """|E_R crossing (L, R)|: the cost of the planted cut."""
    return sum(1 for u, v in inst.noise_edges if (u in inst.left) != (v in inst.left))


def check_property3(f: Graph, alpha: float, d: float) -> bool:
    """
    At most n/alpha vertices of F have degree strictly below alpha*d.

    Raises:
        ValueError: If d is not positive
    """
    if d <= 0:
        raise ValueError(f"d must be positive, got {d}")
    threshold = alpha * d - _SLACK
    low = sum(1 for v in f.vertices if len(f.adjacency[v]) < threshold)
    return low <= len(f.vertices) / alpha


def check_property4(
    inst: PlantedInstance, alpha: float, beta: float, d: float, log_base: float = config.LOG_BASE
) -> Property4Report:
    """
    Evaluate the noise-weight bound on every vertex, using the hidden G and pi(H).

    Heavy noise vertices are those with deg(v, H) >= beta*d; low planted-degree
    vertices those with deg(v, G) < alpha*d (strict, matching check_property3).
    """
    n = inst.n
    beta_d = beta * d
    deg_g = inst.planted_degrees()
    deg_h = inst.noise_degrees()
    heavy = {v for v, k in deg_h.items() if k > 0 and k >= beta_d}
    low = {v for v, k in deg_g.items() if k < alpha * d - _SLACK}

    noise_neighbors: Dict[int, list] = {v: [] for v in range(n)}
    for u, v in inst.noise_image:
        noise_neighbors[u].append(v)
        noise_neighbors[v].append(u)

    additive = 4.0 * config.log(n, log_base)
    report = Property4Report(checked=n)
    for u in range(n):
        lhs = 0.0
        rest = 0.0
        for v in noise_neighbors[u]:
            if v not in heavy:
                continue
            weight = beta_d / deg_h[v]
            if v in low:
                lhs += weight
            else:
                rest += weight
        rhs = (8.0 / alpha) * rest + additive
        if lhs > rhs:
            report.violations[u] = (lhs, rhs)
    if report.violations:
        logger.warning("noise-weight bound fails on %d of %d vertices", len(report.violations), n)
    return report