"""
The Balanced Cut SDP: unit-radius-sqrt(2)/2 vectors, the spreading constraint
against the original vertex count n, and l2^2 triangle inequalities.

The solver is a low-rank factorised first-order method. Every point is kept on
the sphere of radius sqrt(2)/2 by parametrisation, spreading constraints are
enforced through an augmented Lagrangian, and triangle inequalities are added
lazily: after each round the most violated triples join the active set.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
from scipy.optimize import minimize

from pie_balanced_cut import config
from pie_balanced_cut.errors import UnknownVertexError
from pie_balanced_cut.graph import Graph
from pie_balanced_cut.types import SdpParams

logger = logging.getLogger(__name__)

RADIUS = math.sqrt(0.5)
SHORT = "short"
LONG = "long"


@dataclass(frozen=True)
class ViolationReport:
    """Largest violation of each SDP constraint family."""

    norm: float
    spreading: float
    triangle: float
    triples_checked: int
    exhaustive: bool

    def feasible(self, eps: float, n_total: int) -> bool:
        return self.norm <= eps and self.spreading <= eps * n_total and self.triangle <= eps


@dataclass(frozen=True, eq=False)
class Embedding:
    """
    An SDP solution: one point in R^k per embedded vertex.

    Attributes:
        ids: Embedded vertex ids, ascending
        points: (len(ids), k) coordinates, row i belongs to ids[i]
        tolerance: Feasibility slack the solution was produced for
        converged: False when the solver ran out of rounds before reaching tolerance
        report: Violation report of the final iterate, when checked
    """

    ids: np.ndarray
    points: np.ndarray
    tolerance: float = config.SDP_EPS
    converged: bool = True
    report: Optional[ViolationReport] = None

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    def __len__(self) -> int:
        return len(self.ids)

    @cached_property
    def index(self) -> Dict[int, int]:
        return {int(v): i for i, v in enumerate(self.ids)}

    def __contains__(self, v: int) -> bool:
        return int(v) in self.index

    def rows(self, vertices: Iterable[int]) -> np.ndarray:
        """Row indices of the given vertex ids; raises on a vertex without a point."""
        arr = np.asarray(vertices if isinstance(vertices, np.ndarray) else list(vertices), dtype=np.int64)
        if arr.size == 0:
            return arr
        if len(self.ids) == 0:
            raise UnknownVertexError(int(arr.ravel()[0]), where="embedding")
        pos = np.clip(np.searchsorted(self.ids, arr), 0, len(self.ids) - 1)
        bad = self.ids[pos] != arr
        if bad.any():
            raise UnknownVertexError(int(arr[bad].ravel()[0]), where="embedding")
        return pos

    def point(self, v: int) -> np.ndarray:
        return self.points[self.rows([v])[0]]

    def restrict(self, vertices: Iterable[int]) -> "Embedding":
        keep = np.array(sorted(int(v) for v in vertices), dtype=np.int64)
        return replace(self, ids=keep, points=self.points[self.rows(keep)], report=None)

    def distances_from(self, v: int, others: Optional[np.ndarray] = None) -> np.ndarray:
        """Squared distances from v to `others` (default: every embedded vertex)."""
        rows = slice(None) if others is None else self.rows(others)
        diff = self.points[rows] - self.point(v)
        return np.einsum("ij,ij->i", diff, diff)

    def distance_matrix(self, vertices: Optional[np.ndarray] = None) -> np.ndarray:
        x = self.points if vertices is None else self.points[self.rows(vertices)]
        return _sq_dists(x)


def _sq_dists(x: np.ndarray) -> np.ndarray:
    sq = np.einsum("ij,ij->i", x, x)
    d = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d, 0.0, out=d)
    np.fill_diagonal(d, 0.0)
    return d


def intended_embedding(vertices: Iterable[int], left: Iterable[int], dim: int = 2) -> Embedding:
    """The two-point integral solution: e1/sqrt(2) on the left side, e2/sqrt(2) elsewhere."""
    ids = np.array(sorted(int(v) for v in vertices), dtype=np.int64)
    left_set = set(int(v) for v in left)
    points = np.zeros((len(ids), max(dim, 2)))
    on_left = np.array([int(v) in left_set for v in ids], dtype=bool)
    points[on_left, 0] = RADIUS
    points[~on_left, 1] = RADIUS
    return Embedding(ids=ids, points=points, tolerance=0.0)


def sdp_cost(emb: Embedding, g: Graph) -> float:
    """
    Sum over the edges of g of the squared distance between endpoint points.

    Raises:
        UnknownVertexError: If an active vertex of g has no point
    """
    emb.rows(g.sorted_vertices)
    if g.edge_count == 0:
        return 0.0
    edges = g.edge_array
    diff = emb.points[emb.rows(edges[:, 0])] - emb.points[emb.rows(edges[:, 1])]
    return float(np.einsum("ij,ij->", diff, diff))


def edge_length(emb: Embedding, u: int, v: int) -> float:
    diff = emb.point(u) - emb.point(v)
    return float(diff @ diff)


def classify(emb: Embedding, u: int, v: int, threshold: float) -> str:
    """`short` when the squared length is at most the threshold, else `long`."""
    return SHORT if edge_length(emb, u, v) <= threshold else LONG


def edge_lengths(emb: Embedding, g: Graph) -> np.ndarray:
    """Squared lengths of g's edges, in `g.edge_array` order."""
    if g.edge_count == 0:
        return np.zeros(0)
    edges = g.edge_array
    diff = emb.points[emb.rows(edges[:, 0])] - emb.points[emb.rows(edges[:, 1])]
    return np.einsum("ij,ij->i", diff, diff)


def extend_orthogonally(emb: Embedding, removed: Iterable[int]) -> Embedding:
    """
    Give each removed vertex a fresh direction orthogonal to all existing points.

    Each new point is at squared distance 1 from every other point. The dimension
    grows by the number of new vertices.
    """
    extra = sorted(int(v) for v in removed)
    if not extra:
        return emb
    clash = [v for v in extra if v in emb]
    if clash:
        raise ValueError(f"vertex {clash[0]} is already embedded")
    n_old, k = emb.points.shape
    points = np.zeros((n_old + len(extra), k + len(extra)))
    points[:n_old, :k] = emb.points
    for i in range(len(extra)):
        points[n_old + i, k + i] = RADIUS
    ids = np.concatenate([emb.ids, np.array(extra, dtype=np.int64)])
    order = np.argsort(ids, kind="stable")
    return replace(emb, ids=ids[order], points=points[order], report=None)


def _spreading_excess(x: np.ndarray, n_total: int) -> np.ndarray:
    """sum_v (1 - ||x_u - x_v||^2) - n/2 for every u."""
    sq = np.einsum("ij,ij->i", x, x)
    total = x.sum(axis=0)
    # sum_v ||x_u - x_v||^2 = N |x_u|^2 + sum_v |x_v|^2 - 2 <x_u, S>
    dist_sums = len(x) * sq + sq.sum() - 2.0 * (x @ total)
    return len(x) - dist_sums - n_total / 2.0


def _triangle_scan(d: np.ndarray, tol: float, keep: int) -> Tuple[float, np.ndarray]:
    """
    Exhaustive l2^2 triangle scan.

    Returns:
        Tuple[float, np.ndarray]: Largest violation and up to `keep` violated
        (u, v, w) triples (v in the middle), most violated first
    """
    n = len(d)
    worst = 0.0
    found: List[np.ndarray] = []
    scores: List[np.ndarray] = []
    for v in range(n):
        viol = d - d[:, v][:, None] - d[v, :][None, :]
        top = float(viol.max()) if n else 0.0
        worst = max(worst, top)
        if top > tol and keep > 0:
            us, ws = np.nonzero(np.triu(viol > tol, k=1))
            if len(us):
                found.append(np.stack([us, np.full_like(us, v), ws], axis=1))
                scores.append(viol[us, ws])
    if not found:
        return worst, np.zeros((0, 3), dtype=np.int64)
    triples = np.concatenate(found)
    order = np.argsort(-np.concatenate(scores), kind="stable")[:keep]
    return worst, triples[order]


def _triangle_sample(
    x: np.ndarray, samples: int, tol: float, keep: int, rng: np.random.Generator
) -> Tuple[float, np.ndarray]:
    """Triangle check on uniformly sampled triples, all three orientations."""
    n = len(x)
    if n < 3 or samples <= 0:
        return 0.0, np.zeros((0, 3), dtype=np.int64)
    a, b, c = (rng.integers(0, n, size=samples) for _ in range(3))

    def dist(p, q):
        diff = x[p] - x[q]
        return np.einsum("ij,ij->i", diff, diff)

    dab, dbc, dac = dist(a, b), dist(b, c), dist(a, c)
    oriented = [
        (dac - dab - dbc, np.stack([a, b, c], axis=1)),
        (dbc - dab - dac, np.stack([b, a, c], axis=1)),
        (dab - dac - dbc, np.stack([a, c, b], axis=1)),
    ]
    viol = np.concatenate([o[0] for o in oriented])
    triples = np.concatenate([o[1] for o in oriented])
    worst = float(max(viol.max(), 0.0))
    mask = viol > tol
    if not mask.any() or keep <= 0:
        return worst, np.zeros((0, 3), dtype=np.int64)
    viol, triples = viol[mask], triples[mask]
    order = np.argsort(-viol, kind="stable")[:keep]
    return worst, triples[order]


def _certified_triangle_sample(
    x: np.ndarray, tol: float, params: SdpParams, rng: np.random.Generator
) -> Tuple[float, np.ndarray]:
    """
    Sampled triangle check that covers the triples check_feasibility samples
    for the same seed, plus `params.triangle_sample` fresh ones.
    """
    report_rng = np.random.default_rng(params.seed)
    worst, found = _triangle_sample(x, config.FEASIBILITY_SAMPLE_TRIPLES, tol, params.triangle_add, report_rng)
    fresh_worst, fresh = _triangle_sample(x, params.triangle_sample, tol, params.triangle_add, rng)
    triples = np.concatenate([found, fresh])[: params.triangle_add]
    return max(worst, fresh_worst), triples


def check_feasibility(
    emb: Embedding,
    g: Graph,
    n_total: int,
    sample_triples: int = config.FEASIBILITY_SAMPLE_TRIPLES,
    seed: int = 0,
) -> ViolationReport:
    """
    Measure how far an embedding is from satisfying the SDP on g.

    The triangle family is scanned exhaustively for at most
    FEASIBILITY_EXHAUSTIVE_LIMIT vertices and sampled otherwise.
    """
    x = emb.points[emb.rows(g.sorted_vertices)]
    if len(x) == 0:
        return ViolationReport(0.0, 0.0, 0.0, 0, True)
    norm = float(np.max(np.abs(np.einsum("ij,ij->i", x, x) - 0.5)))
    spreading = float(max(_spreading_excess(x, n_total).max(), 0.0))
    if len(x) <= config.FEASIBILITY_EXHAUSTIVE_LIMIT:
        triangle, _ = _triangle_scan(_sq_dists(x), tol=np.inf, keep=0)
        checked = len(x) ** 3
        exhaustive = True
    else:
        triangle, _ = _triangle_sample(x, sample_triples, tol=np.inf, keep=0, rng=np.random.default_rng(seed))
        checked = 3 * sample_triples
        exhaustive = False
    return ViolationReport(norm, spreading, max(triangle, 0.0), checked, exhaustive)


@dataclass
class _AugmentedLagrangian:
    """Objective plus penalty terms over row-normalised factors Y."""

    laplacian: object
    n_total: int
    cost_scale: float
    rho: float
    lam: np.ndarray
    triples: np.ndarray = field(default_factory=lambda: np.zeros((0, 3), dtype=np.int64))
    mu: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def points(self, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        norms = np.maximum(np.linalg.norm(y, axis=1, keepdims=True), 1e-12)
        unit = y / norms
        return RADIUS * unit, unit, norms

    def spreading(self, x: np.ndarray) -> np.ndarray:
        return _spreading_excess(x, self.n_total) / self.n_total

    def triangle_values(self, x: np.ndarray) -> np.ndarray:
        if len(self.triples) == 0:
            return np.zeros(0)
        u, v, w = self.triples[:, 0], self.triples[:, 1], self.triples[:, 2]

        def dist(p, q):
            diff = x[p] - x[q]
            return np.einsum("ij,ij->i", diff, diff)

        return dist(u, w) - dist(u, v) - dist(v, w)

    def __call__(self, flat: np.ndarray, shape: Tuple[int, int]) -> Tuple[float, np.ndarray]:
        y = flat.reshape(shape)
        x, unit, norms = self.points(y)

        lx = self.laplacian @ x
        value = self.cost_scale * float(np.einsum("ij,ij->", x, lx))
        grad = 2.0 * self.cost_scale * lx

        s = self.spreading(x)
        shifted = np.maximum(0.0, s + self.lam / self.rho)
        value += 0.5 * self.rho * float(shifted @ shifted)
        coef = self.rho * shifted / self.n_total
        if coef.any():
            total = x.sum(axis=0)
            grad += 2.0 * (coef[:, None] * total[None, :] + (coef @ x)[None, :])

        if len(self.triples):
            g = self.triangle_values(x)
            z = np.maximum(0.0, g + self.mu / self.rho)
            value += 0.5 * self.rho * float(z @ z)
            weight = (2.0 * self.rho * z)[:, None]
            u, v, w = self.triples[:, 0], self.triples[:, 1], self.triples[:, 2]
            xu, xv, xw = x[u], x[v], x[w]
            np.add.at(grad, u, weight * (xv - xw))
            np.add.at(grad, v, weight * (xu + xw - 2.0 * xv))
            np.add.at(grad, w, weight * (xv - xu))

        radial = np.einsum("ij,ij->i", grad, unit)[:, None]
        grad_y = (RADIUS / norms) * (grad - radial * unit)
        return value, grad_y.ravel()


def _initial_factors(
    g: Graph, dim: int, rng: np.random.Generator, warm_start: Optional[Embedding]
) -> np.ndarray:
    y = rng.standard_normal((len(g.vertices), dim))
    if warm_start is not None and all(int(v) in warm_start for v in g.sorted_vertices):
        w = warm_start.points[warm_start.rows(g.sorted_vertices)]
        k = min(dim, w.shape[1])
        y = 1e-3 * y
        y[:, :k] += w[:, :k]
    return y


def solve(
    g: Graph,
    n_total: int,
    params: SdpParams,
    warm_start: Optional[Embedding] = None,
) -> Embedding:
    """
    Approximately solve the Balanced Cut SDP on g.

    Args:
        g: Active subgraph (nonempty)
        n_total: Vertex count of the original instance, used by the spreading constraint
        params: Solver tunables and seed
        warm_start: Optional starting embedding; if feasible it also competes as a candidate

    Returns:
        Embedding: The cheapest feasible iterate found. When no iterate reaches
        tolerance the least violated one is returned with converged=False.

    Raises:
        ValueError: If g has no vertices
    """
    if len(g.vertices) == 0:
        raise ValueError("cannot solve the SDP on an empty graph")
    rng = np.random.default_rng(params.seed)
    size = len(g.vertices)
    dim = params.dim or config.default_dimension(n_total)
    if warm_start is not None:
        dim = max(dim, warm_start.dim)
    eps = params.eps

    al = _AugmentedLagrangian(
        laplacian=g.laplacian(),
        n_total=n_total,
        cost_scale=1.0 / max(1, g.edge_count),
        rho=params.rho,
        lam=np.zeros(size),
    )
    y = _initial_factors(g, dim, rng, warm_start)
    shape = y.shape

    candidates: List[Tuple[float, float, np.ndarray]] = []
    if warm_start is not None and all(int(v) in warm_start for v in g.sorted_vertices):
        restricted = warm_start.restrict(g.sorted_vertices)
        report = check_feasibility(restricted, g, n_total, seed=params.seed)
        if report.feasible(eps, n_total):
            pad = np.zeros((size, dim))
            pad[:, : restricted.dim] = restricted.points
            candidates.append((sdp_cost(restricted, g), 0.0, pad))

    least_violated: Optional[Tuple[float, np.ndarray]] = None
    previous_cost: Optional[float] = None
    previous_excess = np.inf
    converged = False
    # never scan fewer triples than check_feasibility, so a feasible round stays feasible in the report
    exhaustive = size <= max(params.exhaustive_triangle_limit, config.FEASIBILITY_EXHAUSTIVE_LIMIT)
    for rnd in range(params.max_rounds):
        result = minimize(
            al,
            y.ravel(),
            args=(shape,),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": params.inner_iters},
        )
        y = result.x.reshape(shape)
        x, _, _ = al.points(y)
        cost = float(np.einsum("ij,ij->", x, al.laplacian @ x))

        s = al.spreading(x)
        spread_excess = float(max(s.max(), 0.0))
        if exhaustive:
            tri_excess, new_triples = _triangle_scan(_sq_dists(x), tol=eps / 2, keep=params.triangle_add)
        else:
            tri_excess, new_triples = _certified_triangle_sample(x, eps / 2, params, rng)
        excess = max(spread_excess, tri_excess)
        logger.debug(
            "sdp round %d: cost=%.4f spread=%.2e triangle=%.2e active=%d",
            rnd,
            cost,
            spread_excess,
            tri_excess,
            len(al.triples),
        )

        al.lam = np.maximum(0.0, al.lam + al.rho * s)
        if len(al.triples):
            al.mu = np.maximum(0.0, al.mu + al.rho * al.triangle_values(x))
        if len(new_triples):
            al.triples = np.concatenate([al.triples, new_triples])
            al.mu = np.concatenate([al.mu, np.zeros(len(new_triples))])

        feasible = spread_excess <= eps and tri_excess <= eps
        if feasible:
            candidates.append((cost, excess, x.copy()))
        if least_violated is None or excess < least_violated[0]:
            least_violated = (excess, x.copy())
        if feasible and previous_cost is not None and abs(cost - previous_cost) <= eps * max(1.0, cost):
            converged = True
            break
        if excess > 0.5 * previous_excess:
            al.rho *= params.rho_growth
        previous_excess = excess
        previous_cost = cost

    if candidates:
        best = min(candidates, key=lambda c: c[0])[2]
    else:
        best = least_violated[1]
    emb = Embedding(ids=g.sorted_vertices.copy(), points=best, tolerance=eps)
    report = check_feasibility(emb, g, n_total, seed=params.seed)
    converged = report.feasible(eps, n_total) and (converged or bool(candidates))
    if not converged:
        logger.warning(
            "sdp unconverged on %d vertices: spread=%.3e triangle=%.3e",
            size,
            report.spreading,
            report.triangle,
        )
    return replace(emb, converged=converged, report=report)


def write_embedding(emb: Embedding, path: Union[str, Path]) -> Path:
    """One line per vertex: `id x1 ... xk`."""
    path = Path(path)
    lines = [
        " ".join([str(int(v))] + [f"{c:.9g}" for c in row]) for v, row in zip(emb.ids, emb.points)
    ]
    path.write_text("\n".join(lines) + "\n")
    return path
