#!/usr/bin/env python
"""
Command-line interface for generating PIE instances, cutting them and scoring the cuts.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from pie_balanced_cut import config
from pie_balanced_cut.errors import PieCutError
from pie_balanced_cut.graph import read_edge_list
from pie_balanced_cut.harness import (
    audit,
    bench,
    evaluate,
    load_experiment_config,
    median_ratio,
    write_audit,
)
from pie_balanced_cut.instance_bundle import load_bundle, save_bundle
from pie_balanced_cut.partition_agent import load_result, run, run_blind, write_result
from pie_balanced_cut.partition_agent_nodes.budgets import compute_d
from pie_balanced_cut.pie_generator import crossing_noise, generate
from pie_balanced_cut.types import G_MODELS, H_MODELS, AlgoParams, GeneratorSpec, SdpParams


def _algo_params(args) -> AlgoParams:
    return AlgoParams(
        K=args.K,
        C=args.C,
        T=args.T,
        seed=args.seed,
        strict=not args.record,
        sdp=SdpParams(seed=args.seed),
    )


def _add_algo_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--K", type=float, default=config.K_EFF, help="Master constant K (beta = 200K, alpha = 50 beta)")
    parser.add_argument("--C", type=float, default=config.C_EFF, help="Constant C in d = max(2|E_H|/n, C log^3 n)")
    parser.add_argument("--T", type=int, default=None, help="Number of iterations (default from n)")
    parser.add_argument("--seed", type=int, default=0, help="Random seed")
    parser.add_argument("--record", action="store_true", help="Record failed invariant checks instead of aborting")


def cmd_gen(args) -> None:
    if args.spec:
        spec = GeneratorSpec.from_json(Path(args.spec).read_text())
        if args.seed is not None:
            spec = replace(spec, seed=args.seed)
    else:
        spec = GeneratorSpec(
            n=args.n,
            g_model=args.g_model,
            h_model=args.h_model,
            g_degree=args.g_degree,
            g_file=args.g_file,
            h_p=args.h_p,
            h_mean_degree=args.h_mean_degree,
            h_q=args.h_q,
            h_m=args.h_m,
            h_file=args.h_file,
            seed=args.seed or 0,
        )
    print(f"Generating {spec.g_model} + {spec.noise_label} instance on {spec.n} vertices...")
    inst = generate(spec)
    out = save_bundle(inst, args.out)
    print(f"|E_F| = {inst.f.edge_count}, |E_R| = {len(inst.noise_edges)}, planted cut cost = {crossing_noise(inst)}")
    print(f"Wrote instance bundle to {out}")


def cmd_cut(args) -> None:
    f = read_edge_list(args.graph)
    params = _algo_params(args)
    print(f"Cutting {args.graph} ({len(f.vertices)} vertices, {f.edge_count} edges)...")
    if args.blind:
        result = run_blind(f, params)
        print(f"Blind grid: {', '.join(f'{d:.3g}' for d in result.blind_grid)}; chose d = {result.d:.3g}")
    else:
        result = run(f, params, args.d)
    if result.fallback:
        print("Too many low-degree vertices; used the degree cut")
    if result.degraded:
        print("Warning: the SDP did not converge, result is degraded")
    path = write_result(result, args.out)
    print(f"Cut cost {result.cut_cost}, balance {result.balance:.3f}, {len(result.pieces)} pieces")
    print(f"Wrote result to {path}")


def cmd_eval(args) -> None:
    inst = load_bundle(args.bundle)
    result = load_result(args.result, inst.f)
    baselines = [b for b in args.baselines.split(",") if b]
    report = evaluate(result, inst, baselines, seed=args.seed)
    print(f"Cut cost:        {report.cut_cost}")
    print(f"|E_R|:           {report.noise_budget}")
    print(f"Planted cost:    {report.crossing_noise}")
    print(f"Ratio:           {report.ratio:.3f}")
    print(f"Balance:         {report.balance:.3f}")
    if report.spectral_cost is not None:
        print(f"Spectral cost:   {report.spectral_cost}")
    if report.random_cost is not None:
        print(f"Random cost:     {report.random_cost} (expected {report.random_expected:.1f})")
    print(f"Degree checks:   {report.property3}/{report.property4}")
    if args.out:
        Path(args.out).write_text(report.to_json(indent=2))
        print(f"Wrote report to {args.out}")


def cmd_bench(args) -> None:
    cfg = load_experiment_config(args.config)
    if args.workers:
        cfg.workers = args.workers
    print(f"Running {len(cfg.specs)} specs x {len(cfg.seeds)} seeds with {cfg.workers} workers...")
    rows = bench(cfg)
    failed = [row for row in rows if row["error"]]
    print(f"Finished {len(rows) - len(failed)} runs, {len(failed)} failed")
    ratio = median_ratio(rows)
    if ratio is not None:
        print(f"Median ratio: {ratio:.3f}")
    print(f"Wrote {Path(cfg.output_dir) / 'summary.csv'}")


def cmd_audit(args) -> None:
    params = _algo_params(args)
    if args.bundle:
        inst = load_bundle(args.bundle)
        f = inst.f
        d = args.d or compute_d(len(inst.noise_image), inst.n, params.C)
    else:
        if args.d is None:
            raise PieCutError("--graph needs --d (or pass --bundle to derive d from the ground truth)")
        f = read_edge_list(args.graph)
        d = args.d
    print(f"Auditing {len(f.vertices)} vertices with d = {d:.3g}...")
    report = audit(f, params, d)
    for name, summary in sorted(report.checks.items()):
        print(f"  {name}: {summary.passed} passed, {summary.failed} failed")
    for name, summary in sorted(report.soft.items()):
        print(f"  {name} (soft): {summary.passed} passed, {summary.failed} failed")
    path = write_audit(report, args.out)
    print(f"Wrote audit to {path}")
    if not report.ok:
        sys.exit(1)


def main():
    """Generate, cut and score planted Balanced Cut instances."""
    parser = argparse.ArgumentParser(description="Balanced Cut on planted instances with noise edges.")
    parser.add_argument("--log-level", default=config.LOG_LEVEL, help="Logging level (default from PIECUT_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="Generate an instance bundle")
    gen.add_argument("--spec", default=None, help="GeneratorSpec JSON file (overrides the flags below)")
    gen.add_argument("--n", type=int, default=64, help="Number of vertices (even)")
    gen.add_argument("--g-model", choices=G_MODELS, default="two-random-regular", help="Planted graph model")
    gen.add_argument("--h-model", choices=H_MODELS, default="erdos-renyi", help="Noise graph model")
    gen.add_argument("--g-degree", type=int, default=8, help="Degree of each random regular side")
    gen.add_argument("--g-file", default=None, help="Edge list of G for --g-model file")
    gen.add_argument("--h-p", type=float, default=None, help="Erdos-Renyi edge probability")
    gen.add_argument("--h-mean-degree", type=float, default=None, help="Erdos-Renyi expected degree")
    gen.add_argument("--h-q", type=float, default=None, help="Crossing edge probability")
    gen.add_argument("--h-m", type=int, default=None, help="Preferential attachment edges per vertex")
    gen.add_argument("--h-file", default=None, help="Edge list of H for --h-model file")
    gen.add_argument("--seed", type=int, default=None, help="Random seed (overrides the seed in --spec; default 0)")
    gen.add_argument("--out", required=True, help="Bundle directory")
    gen.set_defaults(func=cmd_gen)

    cut = sub.add_parser("cut", help="Partition a graph")
    cut.add_argument("--graph", required=True, help="Edge list of F")
    mode = cut.add_mutually_exclusive_group(required=True)
    mode.add_argument("--d", type=float, help="Degree scale d")
    mode.add_argument("--blind", action="store_true", help="Search d over a geometric grid")
    _add_algo_arguments(cut)
    cut.add_argument("--out", default="result.json", help="Where to write the result")
    cut.set_defaults(func=cmd_cut)

    ev = sub.add_parser("eval", help="Score a result against the hidden ground truth")
    ev.add_argument("--bundle", required=True, help="Instance bundle directory")
    ev.add_argument("--result", required=True, help="result.json from `cut`")
    ev.add_argument("--baselines", default="spectral,random", help="Comma-separated baselines to run")
    ev.add_argument("--seed", type=int, default=0, help="Seed for the random baseline")
    ev.add_argument("--out", default=None, help="Where to write report.json")
    ev.set_defaults(func=cmd_eval)

    be = sub.add_parser("bench", help="Run a generator x seed grid")
    be.add_argument("--config", required=True, help="TOML bench config")
    be.add_argument("--workers", type=int, default=None, help="Override the worker count")
    be.set_defaults(func=cmd_bench)

    au = sub.add_parser("audit", help="Run with every invariant check recorded")
    source = au.add_mutually_exclusive_group(required=True)
    source.add_argument("--graph", help="Edge list of F")
    source.add_argument("--bundle", help="Instance bundle directory")
    au.add_argument("--d", type=float, default=None, help="Degree scale d")
    _add_algo_arguments(au)
    au.add_argument("--out", default="audit.json", help="Where to write audit.json")
    au.set_defaults(func=cmd_audit)

    args = parser.parse_args()
    config.configure_logging(args.log_level)

    try:
        args.func(args)
    except PieCutError as e:
        print(f"Error: {e}")
        sys.exit(2)


if __name__ == "__main__":
    main()
