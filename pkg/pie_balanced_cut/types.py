from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from dataclasses_json import dataclass_json

from pie_balanced_cut import config
from pie_balanced_cut.errors import InfeasibleSpecError, OddVertexCountError
from pie_balanced_cut.graph import Cut, EdgeSet


G_MODELS = ("two-random-regular", "two-grids", "two-cliques", "file")
H_MODELS = ("erdos-renyi", "bipartite-crossing", "preferential-attachment", "file")

STEP_LONG_EDGES = 2
STEP_HEAVY_VERTICES = 3
STEP_DAMAGE_CONTROL = 4


@dataclass_json
@dataclass
class GeneratorSpec:
    """Which planted graph G and noise graph H to draw, and with which parameters."""

    n: int
    g_model: str = "two-random-regular"
    h_model: str = "erdos-renyi"
    g_degree: int = 8
    g_file: Optional[str] = None
    h_p: Optional[float] = None
    h_mean_degree: Optional[float] = None
    h_q: Optional[float] = None
    h_m: Optional[int] = None
    h_file: Optional[str] = None
    seed: int = 0

    def validate(self) -> None:
        """
        Raises:
            OddVertexCountError: If n is odd
            InfeasibleSpecError: If a model or its parameters are out of range
        """
        if self.n < 2 or self.n % 2:
            raise OddVertexCountError(f"n must be even and >= 2, got {self.n}")
        if self.g_model not in G_MODELS:
            raise InfeasibleSpecError(f"unknown g_model {self.g_model!r}; expected one of {G_MODELS}")
        if self.h_model not in H_MODELS:
            raise InfeasibleSpecError(f"unknown h_model {self.h_model!r}; expected one of {H_MODELS}")
        half = self.n // 2
        if self.g_model == "two-random-regular":
            if not 0 < self.g_degree < half:
                raise InfeasibleSpecError(f"regular degree must satisfy 0 < r < n/2, got r={self.g_degree}")
            if (self.g_degree * half) % 2:
                raise InfeasibleSpecError("regular degree times n/2 must be even")
        if self.g_model == "file" and not self.g_file:
            raise InfeasibleSpecError("g_model=file needs g_file")
        if self.h_model == "file" and not self.h_file:
            raise InfeasibleSpecError("h_model=file needs h_file")
        if self.h_model == "erdos-renyi":
            p = self.edge_probability()
            if not 0.0 <= p <= 1.0:
                raise InfeasibleSpecError(f"edge probability must lie in [0, 1], got {p}")
        if self.h_model == "bipartite-crossing" and not 0.0 <= (self.h_q or 0.0) <= 1.0:
            raise InfeasibleSpecError(f"crossing probability must lie in [0, 1], got {self.h_q}")
        if self.h_model == "preferential-attachment":
            if self.h_m is None or not 0 < self.h_m < self.n:
                raise InfeasibleSpecError(f"attachment count must satisfy 0 < m < n, got {self.h_m}")

    def edge_probability(self) -> float:
        if self.h_p is not None:
            return self.h_p
        if self.h_mean_degree is not None:
            return self.h_mean_degree / (self.n - 1)
        return 0.0

    @property
    def noise_label(self) -> str:
        if self.h_model == "erdos-renyi":
            return f"erdos-renyi(p={self.edge_probability():.4g})"
        if self.h_model == "bipartite-crossing":
            return f"bipartite-crossing(q={self.h_q})"
        if self.h_model == "preferential-attachment":
            return f"preferential-attachment(m={self.h_m})"
        return "file"


@dataclass_json
@dataclass
class SdpParams:
    """Tunables of the low-rank augmented-Lagrangian SDP solver."""

    dim: Optional[int] = None
    max_rounds: int = config.SDP_MAX_ROUNDS
    inner_iters: int = config.SDP_INNER_ITERS
    rho: float = config.SDP_RHO
    rho_growth: float = config.SDP_RHO_GROWTH
    eps: float = config.SDP_EPS
    triangle_sample: int = config.SDP_TRIANGLE_SAMPLE
    triangle_add: int = config.SDP_TRIANGLE_ADD
    exhaustive_triangle_limit: int = config.SDP_EXHAUSTIVE_TRIANGLE_LIMIT
    max_retries: int = config.SDP_MAX_RETRIES
    seed: int = 0

    def __post_init__(self):
        if self.dim is not None and self.dim < 2:
            raise ValueError(f"embedding dimension must be >= 2, got {self.dim}")
        if self.eps <= 0:
            raise ValueError(f"tolerance must be positive, got {self.eps}")
        if self.max_rounds < 1:
            raise ValueError(f"max_rounds must be >= 1, got {self.max_rounds}")


@dataclass_json
@dataclass
class AlgoParams:
    """Constants of the main algorithm; beta, alpha and D_n derive from K."""

    K: float = config.K_EFF
    C: float = config.C_EFF
    delta: float = config.DELTA
    T: Optional[int] = None
    c_arv: float = config.C_ARV
    d_eff: float = config.D_EFF
    sdp: SdpParams = field(default_factory=SdpParams)
    seed: int = 0
    strict: bool = True

    def __post_init__(self):
        if self.K <= 0:
            raise ValueError(f"K must be positive, got {self.K}")

    @property
    def beta(self) -> float:
        return 200.0 * self.K

    @property
    def alpha(self) -> float:
        return 50.0 * self.beta

    @property
    def D_n(self) -> float:
        return max(self.d_eff, self.alpha)

    def iterations(self, n: int) -> int:
        return self.T if self.T is not None else config.default_iterations(n)

    @staticmethod
    def eta(t: int) -> float:
        return 2.0 ** (-t)


@dataclass
class BudgetState:
    """
    Per-vertex budgets, the extra budget and the ledger of cut edges.

    The budget of every active vertex equals its initial budget plus the number
    of ledger edges incident on it.
    """

    budget: Dict[int, int]
    initial: Dict[int, int]
    extra_budget: float
    cut_ledger: List[Tuple[int, int, EdgeSet]] = field(default_factory=list)

    def total(self, active) -> float:
        return sum(self.budget[v] for v in active) + self.extra_budget

    def of(self, vertices) -> int:
        return sum(self.budget[v] for v in vertices)

    def record(self, t: int, step: int, edges: EdgeSet) -> None:
        self.cut_ledger.append((t, step, edges))

    def cut_edges(self) -> List[Tuple[int, int]]:
        return [e for _, _, edges in self.cut_ledger for e in edges]


@dataclass_json
@dataclass
class IterationTrace:
    t: int
    sdp_cost: float
    sdp_converged: bool
    long_cut: int
    heavy_components: int
    heavy_cut: int
    damage_y_size: int
    damage_cut: int
    total_budget: float
    extra_budget: float
    active_n: int
    sdp_ratio: float


@dataclass_json
@dataclass
class ResultRecord:
    """The result.json schema of the `cut` command."""

    cut_cost: int
    balance: float
    pieces: List[List[int]]
    iterations: List[IterationTrace]
    params: AlgoParams
    degraded: bool
    runtime_ms: float
    d: float
    fallback: bool = False
    side_a: List[int] = field(default_factory=list)
    blind_grid: List[float] = field(default_factory=list)
    violations: Dict[str, int] = field(default_factory=dict)


@dataclass_json
@dataclass
class CheckSummary:
    passed: int = 0
    failed: int = 0
    first_failure: Optional[str] = None
    first_context: Dict[str, str] = field(default_factory=dict)


@dataclass_json
@dataclass
class InvariantAuditReport:
    checks: Dict[str, CheckSummary] = field(default_factory=dict)
    soft: Dict[str, CheckSummary] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(summary.failed == 0 for summary in self.checks.values())

    def failures(self) -> Dict[str, int]:
        return {name: s.failed for name, s in self.checks.items() if s.failed}


@dataclass_json
@dataclass
class ScoreReport:
    """How a partition compares with the hidden planted cut and the baselines."""

    cut_cost: int
    noise_budget: int
    crossing_noise: int
    ratio: float
    balance: float
    cost_verified: bool
    spectral_cost: Optional[int] = None
    random_cost: Optional[int] = None
    random_expected: Optional[float] = None
    property3: Optional[bool] = None
    property4: Optional[bool] = None
    invariant_failures: Dict[str, int] = field(default_factory=dict)


@dataclass_json
@dataclass
class ExperimentConfig:
    """A bench grid: generator specs x seeds, one algorithm setting, baselines."""

    specs: List[GeneratorSpec]
    seeds: List[int]
    params: AlgoParams = field(default_factory=AlgoParams)
    baselines: List[str] = field(default_factory=lambda: ["spectral", "random"])
    output_dir: str = "bench_out"
    blind: bool = False
    workers: int = config.DEFAULT_WORKERS

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("bench config needs at least one seed")
        if not self.specs:
            raise ValueError("bench config needs at least one generator spec")


@dataclass
class PartitionResult:
    """Output of one partition run: the pieces, the combined two-sided cut and its trace."""

    pieces: List[List[int]]
    cut: Cut
    trace: List[IterationTrace]
    params: AlgoParams
    d: float
    degraded: bool = False
    fallback: bool = False
    runtime_ms: float = 0.0
    blind_grid: List[float] = field(default_factory=list)
    audit: InvariantAuditReport = field(default_factory=InvariantAuditReport)

    @property
    def cut_cost(self) -> int:
        return self.cut.cost

    @property
    def n(self) -> int:
        return len(self.cut.side_a) + len(self.cut.side_b)

    @property
    def balance(self) -> float:
        return self.cut.min_side_fraction(self.n)

    def to_record(self) -> ResultRecord:
        return ResultRecord(
            cut_cost=self.cut_cost,
            balance=self.balance,
            pieces=[sorted(p) for p in self.pieces],
            iterations=self.trace,
            params=self.params,
            degraded=self.degraded,
            runtime_ms=self.runtime_ms,
            d=self.d,
            fallback=self.fallback,
            side_a=sorted(self.cut.side_a),
            blind_grid=list(self.blind_grid),
            violations=self.audit.failures(),
        )


@dataclass_json
@dataclass
class RunReport:
    """report.json of one bench run."""

    spec: GeneratorSpec
    seed: int
    d: float
    score: ScoreReport
    result: ResultRecord
