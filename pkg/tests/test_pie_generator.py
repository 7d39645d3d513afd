import tempfile
from collections import Counter

import numpy as np
import pytest
from scipy.stats import chisquare, ks_2samp

from pie_balanced_cut.errors import InfeasibleSpecError, OddVertexCountError, SizeMismatchError
from pie_balanced_cut.graph import Graph
from pie_balanced_cut.instance_bundle import GRAPH_FILE, TRUTH_FILE, load_bundle, load_public_graph, save_bundle
from pie_balanced_cut.partition_agent_nodes.budgets import compute_d
from pie_balanced_cut.pie_generator import (
    build_noise,
    build_planted,
    check_property3,
    check_property4,
    compose,
    crossing_noise,
    generate,
    sample_pi,
)
from pie_balanced_cut.types import AlgoParams, GeneratorSpec


def _regular_spec(**overrides):
    values = dict(n=64, g_model="two-random-regular", g_degree=6, h_model="erdos-renyi", h_mean_degree=3.0, seed=1)
    values.update(overrides)
    return GeneratorSpec(**values)


def test_generated_instance_is_consistent():
    inst = generate(_regular_spec())
    assert len(inst.left) == 32 and len(inst.right) == 32
    assert inst.left | inst.right == frozenset(range(64))

    for u, v in inst.planted_edges:
        assert (u in inst.left) == (v in inst.left), f"Planted edge ({u}, {v}) crosses the planted cut"
    degrees = inst.planted_degrees()
    assert set(degrees.values()) == {6}, "Every vertex of G has the regular degree"

    assert inst.f.edge_set() == inst.planted_edges | inst.noise_edges
    assert not inst.planted_edges & inst.noise_edges, "Overlapping edges are kept out of E_R"
    assert inst.overlap_edges <= inst.planted_edges
    assert inst.f.edge_count == len(inst.planted_edges) + len(inst.noise_edges)


def test_generation_is_deterministic_per_seed():
    a = generate(_regular_spec(seed=5))
    b = generate(_regular_spec(seed=5))
    c = generate(_regular_spec(seed=6))
    assert a.f.edges() == b.f.edges()
    assert a.left == b.left
    assert a.f.edges() != c.f.edges(), "Different seeds should give different instances"


def test_crossing_noise_on_bipartite_noise():
    inst = generate(_regular_spec(h_model="bipartite-crossing", h_q=0.2, h_mean_degree=None))
    crossing = [(u, v) for u, v in inst.noise_edges if (u in inst.left) != (v in inst.left)]
    assert crossing_noise(inst) == len(crossing)
    assert crossing_noise(inst) > 0


@pytest.mark.parametrize(
    "spec, error",
    [
        (dict(n=63), OddVertexCountError),
        (dict(g_degree=32), InfeasibleSpecError),
        (dict(n=10, g_degree=3), InfeasibleSpecError),
        (dict(h_model="preferential-attachment", h_m=None), InfeasibleSpecError),
        (dict(g_model="file"), InfeasibleSpecError),
        (dict(h_p=1.5, h_mean_degree=None), InfeasibleSpecError),
    ],
)
def test_invalid_specs_are_rejected(spec, error):
    with pytest.raises(error):
        generate(_regular_spec(**spec))


def test_sample_pi_preserves_sides():
    pi = sample_pi(20, seed=3)
    assert sorted(pi.tolist()) == list(range(20))
    assert set(pi[:10].tolist()) == set(range(10))
    assert set(pi[10:].tolist()) == set(range(10, 20))
    with pytest.raises(OddVertexCountError):
        sample_pi(7, seed=0)


def test_sample_pi_is_uniform_over_side_preserving_bijections():
    # n = 4: two choices per side, four bijections in total
    counts = Counter(tuple(sample_pi(4, seed=s).tolist()) for s in range(10_000))
    assert len(counts) == 4, f"Expected 4 distinct bijections, got {sorted(counts)}"
    _, p_value = chisquare(list(counts.values()))
    assert p_value > 0.01, f"Bijections look non-uniform: {dict(counts)}"


def test_compose_collapses_overlap():
    g = Graph.from_edges(4, [(0, 1)])
    h = Graph.from_edges(4, [(0, 1), (2, 3)])
    f = compose(g, h, np.arange(4))
    assert f.edges() == [(0, 1), (2, 3)]

    swapped = compose(g, h, np.array([1, 0, 3, 2]))
    assert swapped.edges() == [(0, 1), (2, 3)]

    with pytest.raises(SizeMismatchError):
        compose(g, Graph.from_edges(6, []), np.arange(4))


def test_property3():
    star = Graph.from_edges(5, [(0, i) for i in range(1, 5)])
    # alpha*d = 2: four leaves below it, allowance n/alpha = 2.5
    assert not check_property3(star, alpha=2.0, d=1.0)
    # alpha*d = 1: nobody below it
    assert check_property3(star, alpha=1.0, d=1.0)
    with pytest.raises(ValueError):
        check_property3(star, alpha=1.0, d=0.0)


def test_property4_holds_without_noise():
    inst = generate(_regular_spec(h_mean_degree=0.0))
    assert not inst.noise_edges
    report = check_property4(inst, alpha=1.0, beta=0.02, d=1.0)
    assert report.passed
    assert report.checked == 64


def test_side_degrees_do_not_depend_on_the_bijection():
    spec = _regular_spec(h_mean_degree=6.0)
    rng = np.random.default_rng(0)
    g = build_planted(spec, rng)
    h = build_noise(spec, rng)
    half = spec.n // 2

    def left_degrees(seeds):
        degrees = []
        for seed in seeds:
            f = compose(g, h, sample_pi(spec.n, seed))
            degrees.extend(len(f.adjacency[v]) for v in range(half))
        return degrees

    _, p_value = ks_2samp(left_degrees(range(50)), left_degrees(range(1000, 1050)))
    assert p_value > 0.01, "Degrees on L should have the same distribution for any two bijections"


@pytest.mark.parametrize("mean_degree", [4.0, 16.0])
def test_degree_checks_hold_on_most_seeds(mean_degree):
    params = AlgoParams()
    passed = 0
    for seed in range(20):
        inst = generate(GeneratorSpec(n=256, g_degree=8, h_mean_degree=mean_degree, seed=seed))
        d = compute_d(len(inst.noise_image), inst.n, params.C)
        property4 = check_property4(inst, params.alpha, params.beta, d)
        if check_property3(inst.f, params.alpha, d) and property4.passed:
            passed += 1
    assert passed >= 19, f"Degree checks passed on only {passed} of 20 seeds"


def test_bundle_round_trip():
    inst = generate(_regular_spec(n=32, g_degree=4, seed=2))
    with tempfile.TemporaryDirectory() as temp_dir:
        out = save_bundle(inst, temp_dir)
        assert (out / GRAPH_FILE).exists(), "Public graph was not written"
        assert (out / TRUTH_FILE).exists(), "Ground truth was not written"

        public = load_public_graph(out)
        loaded = load_bundle(out)

    assert public.edges() == inst.f.edges()
    assert loaded.left == inst.left
    assert loaded.planted_edges == inst.planted_edges
    assert loaded.noise_edges == inst.noise_edges
    assert loaded.overlap_edges == inst.overlap_edges
    assert np.array_equal(loaded.pi, inst.pi)
    assert loaded.generator_params == inst.generator_params
    assert crossing_noise(loaded) == crossing_noise(inst)
