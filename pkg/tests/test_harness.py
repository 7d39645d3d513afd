import csv
import json
import tempfile
from itertools import combinations
from pathlib import Path

import networkx as nx
import pytest

from pie_balanced_cut.baselines import baseline_random, baseline_spectral, expected_random_bisection_cost
from pie_balanced_cut.graph import Graph
from pie_balanced_cut.harness import (
    SUMMARY_COLUMNS,
    audit,
    bench,
    evaluate,
    exhaustive_balanced_cut,
    load_experiment_config,
    median_ratio,
    recount_cut_cost,
    write_audit,
)
from pie_balanced_cut.partition_agent import load_result, run, write_result
from pie_balanced_cut.partition_agent_nodes.budgets import compute_d
from pie_balanced_cut.pie_generator import generate
from pie_balanced_cut.types import AlgoParams, GeneratorSpec, SdpParams


def two_cliques(k: int, bridges=()) -> Graph:
    edges = list(nx.complete_graph(k).edges())
    return Graph.from_edges(2 * k, edges + [(u + k, v + k) for u, v in edges] + list(bridges))


def test_spectral_baseline():
    assert baseline_spectral(two_cliques(4)).cost == 0
    path = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    assert baseline_spectral(path).cost == 1
    square = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    cut = baseline_spectral(square)
    assert cut.cost >= 2
    assert len(cut.side_a) == 2


def test_random_baseline_is_a_seeded_bisection():
    g = two_cliques(5)
    a = baseline_random(g, seed=4)
    b = baseline_random(g, seed=4)
    assert a.side_a == b.side_a
    assert len(a.side_a) == 5
    assert baseline_random(Graph.from_edges(6, []), seed=1).cost == 0


def test_random_baseline_ignores_the_planted_side():
    # the bench seeds the instance and the baseline alike
    for seed in range(4):
        inst = generate(GeneratorSpec(n=256, g_degree=8, h_mean_degree=4.0, seed=seed))
        overlap = len(baseline_random(inst.f, seed).side_a & inst.left)
        assert abs(overlap - 64) <= 25, f"Seed {seed}: the random side shares {overlap} of 128 vertices with L"


def test_expected_random_bisection_cost_matches_enumeration():
    g = two_cliques(4)
    costs = [recount_cut_cost(g, side) for side in combinations(range(8), 4)]
    assert sum(costs) / len(costs) == pytest.approx(expected_random_bisection_cost(g.edge_count, 8))
    assert expected_random_bisection_cost(5, 1) == 0.0


def test_exhaustive_balanced_cut():
    cut = exhaustive_balanced_cut(two_cliques(4, bridges=[(0, 4)]))
    assert cut.cost == 1
    assert {cut.side_a, cut.side_b} == {frozenset(range(4)), frozenset(range(4, 8))}
    with pytest.raises(ValueError):
        exhaustive_balanced_cut(Graph.from_edges(17, []))


def _clique_instance(n: int = 16, seed: int = 0):
    return generate(GeneratorSpec(n=n, g_model="two-cliques", h_model="erdos-renyi", h_p=0.0, seed=seed))


def test_evaluate_and_result_file():
    inst = _clique_instance()
    params = AlgoParams(T=2, strict=False, sdp=SdpParams(seed=0))
    d = compute_d(len(inst.noise_image), inst.n, params.C)
    result = run(inst.f, params, d)

    report = evaluate(result, inst, baselines=["spectral", "random"], seed=0)
    assert report.cost_verified
    assert report.noise_budget == 0 and report.crossing_noise == 0
    assert report.cut_cost == result.cut_cost
    assert report.ratio == result.cut_cost
    assert report.spectral_cost == 0, "Spectral splits two disjoint cliques for free"
    assert report.random_expected == pytest.approx(expected_random_bisection_cost(inst.f.edge_count, 16))
    assert report.property3

    with tempfile.TemporaryDirectory() as temp_dir:
        path = write_result(result, Path(temp_dir) / "result.json")
        record = json.loads(path.read_text())
        assert record["cut_cost"] == result.cut_cost
        loaded = load_result(path, inst.f)

        tampered = dict(record, cut_cost=record["cut_cost"] + 1)
        bad = Path(temp_dir) / "bad.json"
        bad.write_text(json.dumps(tampered))
        with pytest.raises(ValueError):
            load_result(bad, inst.f)

    assert loaded.cut.side_a == result.cut.side_a
    assert loaded.pieces == [sorted(p) for p in result.pieces]


def test_audit_on_edgeless_graph():
    f = Graph.from_edges(16, [])
    report = audit(f, AlgoParams(T=1, strict=True), d=1.0)
    assert report.checks["ledger_identity"].failed == 0
    assert report.checks["edge_conservation"].failed == 0
    with tempfile.TemporaryDirectory() as temp_dir:
        path = write_audit(report, Path(temp_dir) / "audit.json")
        assert "ledger_identity" in json.loads(path.read_text())["checks"]


BENCH_TOML = """
seeds = [0, 1]
workers = 2
baselines = ["random"]
output_dir = "{out}"

[params]
T = 1

[[specs]]
n = 16
g_model = "two-cliques"
h_model = "erdos-renyi"
h_p = 0.0

[[specs]]
n = 15
g_model = "two-cliques"
h_model = "erdos-renyi"
h_p = 0.0
"""


def test_bench_writes_summary_and_keeps_failed_runs():
    with tempfile.TemporaryDirectory() as temp_dir:
        out = Path(temp_dir) / "bench"
        cfg_path = Path(temp_dir) / "bench.toml"
        cfg_path.write_text(BENCH_TOML.format(out=out.as_posix()))

        cfg = load_experiment_config(cfg_path)
        assert cfg.params.T == 1
        assert [spec.n for spec in cfg.specs] == [16, 15]

        rows = bench(cfg)
        assert len(rows) == 4, "One row per spec x seed"
        good = [row for row in rows if row["error"] == ""]
        failed = [row for row in rows if row["error"]]
        assert len(good) == 2
        assert len(failed) == 2 and all("OddVertexCountError" in row["error"] for row in failed)
        assert median_ratio(rows) is not None

        with open(out / "summary.csv", newline="") as fh:
            summary = list(csv.DictReader(fh))
        assert len(summary) == 4
        assert list(summary[0].keys()) == SUMMARY_COLUMNS
        assert (out / "n16-two-cliques-erdos-renyi-seed0" / "report.json").exists()


PLANTED_BENCH_TOML = """
seeds = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9]
workers = 2
output_dir = "{out}"

[[specs]]
n = 256
g_model = "two-random-regular"
g_degree = 8
h_model = "erdos-renyi"
h_mean_degree = 4.0
"""


@pytest.mark.slow
def test_bench_on_planted_instances():
    with tempfile.TemporaryDirectory() as temp_dir:
        out = Path(temp_dir) / "bench"
        cfg_path = Path(temp_dir) / "bench.toml"
        cfg_path.write_text(PLANTED_BENCH_TOML.format(out=out.as_posix()))
        rows = bench(load_experiment_config(cfg_path))

    assert all(row["error"] == "" for row in rows), [row["error"] for row in rows if row["error"]]
    ratio = median_ratio(rows)
    assert ratio <= 10, f"Median ratio to the planted cut is {ratio}"
    assert all(row["cut_cost"] < row["random_cost"] for row in rows), "Every run should beat a random bisection"
    assert all(isinstance(row["sdp_monotone"], bool) for row in rows), "The SDP cost trace is reported per run"
    print(f"Median ratio {ratio:.3f}, {sum(row['sdp_monotone'] for row in rows)} of {len(rows)} traces monotone")
