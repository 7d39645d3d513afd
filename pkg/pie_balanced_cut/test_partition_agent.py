import json
import os
import tempfile

from pie_balanced_cut.harness import evaluate
from pie_balanced_cut.instance_bundle import load_bundle, load_public_graph, save_bundle
from pie_balanced_cut.partition_agent import run, write_result
from pie_balanced_cut.partition_agent_nodes.budgets import compute_d
from pie_balanced_cut.pie_generator import generate
from pie_balanced_cut.types import AlgoParams, GeneratorSpec, SdpParams


def test_partition_planted_instance():
    """Generate a small PIE instance, cut its public graph and score the result."""
    # Create a sample instance: two 4-regular halves plus sparse noise
    spec = GeneratorSpec(n=32, g_model="two-random-regular", g_degree=4, h_model="erdos-renyi", h_mean_degree=1.0, seed=11)
    inst = generate(spec)

    # Create a temporary directory for the bundle and the result
    with tempfile.TemporaryDirectory() as temp_dir:
        bundle_dir = os.path.join(temp_dir, "bundle")
        save_bundle(inst, bundle_dir)

        # The solver only sees the public graph
        f = load_public_graph(bundle_dir)
        params = AlgoParams(seed=0, strict=False, sdp=SdpParams(seed=0))
        d = compute_d(len(inst.noise_image), inst.n, params.C)
        result = run(f, params, d)

        # Check that the result was written
        output_path = write_result(result, os.path.join(temp_dir, "result.json"))
        assert output_path.exists(), "result.json should be written"
        with open(output_path, "r") as fh:
            record = json.load(fh)
        assert record["cut_cost"] == result.cut_cost, "Recorded cost should match the result"
        assert len(record["iterations"]) == len(result.trace), "Every iteration should be traced"

        # Check the score against the hidden ground truth
        report = evaluate(result, load_bundle(bundle_dir), baselines=["spectral", "random"])
        assert report.cost_verified, "Cut cost should match an edge-by-edge recount"
        assert sorted(v for piece in result.pieces for v in piece) == list(range(32)), "Pieces should cover F"
        if "piece_size" not in result.audit.failures():
            assert report.balance >= 0.25 - 0.05, f"Smaller side too small: {report.balance}"

        print(f"Cut cost {report.cut_cost} (planted {report.crossing_noise}, spectral {report.spectral_cost})")
        print(f"Balance {report.balance:.3f}, {len(result.pieces)} pieces, {len(result.trace)} iterations")
        print(f"Invariant failures: {report.invariant_failures or 'none'}")


if __name__ == "__main__":
    test_partition_planted_instance()
