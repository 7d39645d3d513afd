"""
Read and write instance bundles.

A bundle directory holds the public graph (`graph.edges`) apart from the hidden
ground truth (`truth.json`, `planted.edges`, `noise.edges`), so the solver can be
pointed at `graph.edges` alone and run blind.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Union

import numpy as np
from dataclasses_json import dataclass_json

from pie_balanced_cut.graph import Graph, edge_set, read_edge_list, write_edge_list
from pie_balanced_cut.pie_generator import PlantedInstance
from pie_balanced_cut.types import GeneratorSpec

logger = logging.getLogger(__name__)

GRAPH_FILE = "graph.edges"
TRUTH_FILE = "truth.json"
PLANTED_FILE = "planted.edges"
NOISE_FILE = "noise.edges"


@dataclass_json
@dataclass
class TruthRecord:
    """Serialized ground truth of a PIE instance (truth.json)."""

    n: int
    seed: int
    left: List[int]
    planted_edges_count: int
    planted_edges_file: str
    noise_edges_file: str
    pi: List[int]
    generator_params: GeneratorSpec
    overlap_count: int
    overlap_edges: List[List[int]] = field(default_factory=list)


def save_bundle(inst: PlantedInstance, out_dir: Union[str, Path]) -> Path:
    """
    Write an instance bundle.

    Args:
        inst: The instance to store
        out_dir: Bundle directory (created if missing)

    Returns:
        Path: The bundle directory
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_edge_list(inst.f, out / GRAPH_FILE)
    write_edge_list(Graph.from_edges(inst.n, inst.planted_edges), out / PLANTED_FILE)
    write_edge_list(Graph.from_edges(inst.n, inst.noise_edges), out / NOISE_FILE)

    truth = TruthRecord(
        n=inst.n,
        seed=inst.seed,
        left=sorted(inst.left),
        planted_edges_count=len(inst.planted_edges),
        planted_edges_file=PLANTED_FILE,
        noise_edges_file=NOISE_FILE,
        pi=[int(x) for x in inst.pi],
        generator_params=inst.generator_params,
        overlap_count=inst.overlap_count,
        overlap_edges=[list(e) for e in sorted(inst.overlap_edges)],
    )
    (out / TRUTH_FILE).write_text(truth.to_json(indent=2))
    logger.info("saved bundle for n=%d seed=%d to %s", inst.n, inst.seed, out)
    return out


def load_public_graph(bundle_dir: Union[str, Path]) -> Graph:
    """Only the public graph F; nothing hidden is read."""
    return read_edge_list(Path(bundle_dir) / GRAPH_FILE)


def load_bundle(bundle_dir: Union[str, Path]) -> PlantedInstance:
    """Load F together with its ground truth."""
    root = Path(bundle_dir)
    truth = TruthRecord.from_json((root / TRUTH_FILE).read_text())
    f = read_edge_list(root / GRAPH_FILE)
    planted = read_edge_list(root / truth.planted_edges_file).edge_set()
    noise = read_edge_list(root / truth.noise_edges_file).edge_set()
    left = frozenset(truth.left)
    return PlantedInstance(
        f=f,
        left=left,
        right=frozenset(range(truth.n)) - left,
        planted_edges=planted,
        noise_edges=noise,
        overlap_edges=edge_set(tuple(e) for e in truth.overlap_edges),
        pi=np.array(truth.pi, dtype=np.int64),
        seed=truth.seed,
        generator_params=truth.generator_params,
    )
