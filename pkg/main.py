"""proxembed - command-line entry point.

Subcommands:
  node-embed   embed the nodes of one graph and write a CSV
  graph-embed  mean-pooled features for every graph of a dataset directory
  eval         node classification, node clustering or graph classification
  sweep        proximity x nonlinearity grid, or a proximity-order sweep
  synth        synthetic role graphs and two-family graph datasets
  diagnose     row statistics of filtered proximity matrices

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from proxembed.config import PRESETS, PipelineConfig, Settings, load_config
from proxembed.evaluator import EvalReport, classify_graphs, classify_nodes, cluster_nodes, row_stats, row_stats_histogram
from proxembed.exceptions import ConfigError, GraphDataError, ProxembedError, exit_code_for
from proxembed.graph_core import Graph, load_edge_list, load_labels
from proxembed.graph_features import embed_graph_set, feature_matrix, netlsd_features, netlsd_scales, retgk_features
from proxembed.nonlinearity import apply_filter, parse_filter
from proxembed.pipeline import run_pipeline
from proxembed.proximity import Operator, compute_proximity, parse_operator
from proxembed.sweep import DEFAULT_FILTERS, rank_design_choices, run_design_grid, run_order_sweep
from proxembed.synth import generate_graph_families, generate_role_graph
from proxembed.utils.artifact_manager import (
    load_embedding_bundle,
    load_embedding_csv,
    load_graph_dataset,
    save_edge_list,
    save_embedding_bundle,
    save_embedding_csv,
    save_features_csv,
    save_graph_dataset,
    save_labels,
    save_matrix_csv,
    save_report_json,
    save_table_csv,
)

logger = logging.getLogger("proxembed")

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors as ConfigError (exit 1)."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise ConfigError(f"{self.prog}: {message}")


def banner(title: str) -> None:
    print("\n" + "=" * 70)
    print(title)
    print("=" * 70)


def add_config_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("pipeline configuration")
    group.add_argument("--preset", type=str, default=None, choices=sorted(PRESETS), help="Named method preset")
    group.add_argument("--config", type=str, default=None, help="Config file with dotted 'key = value' lines")
    group.add_argument("--proximity", type=str, default=None, help="ppmi | hk | fabp | ppr | lap_pinv | adj_pow | rw_pow")
    group.add_argument("--nonlinearity", type=str, default=None, help="identity | log | bin:p")
    group.add_argument("--embedding", type=str, default=None, choices=["svd", "cfs", "diag"], help="Embedding function")
    group.add_argument("--dimension", type=int, default=None, help="Embedding width per scale")
    group.add_argument("--scales", type=str, default=None, help="Comma-separated multiscale values")
    group.add_argument("--T", type=int, default=None, help="PPMI window size")
    group.add_argument("--b", type=float, default=None, help="PPMI negative sampling")
    group.add_argument("--s", type=float, default=None, help="Heat kernel scale")
    group.add_argument("--a", type=float, default=None, help="FaBP a")
    group.add_argument("--c", type=float, default=None, help="FaBP c")
    group.add_argument("--beta", type=float, default=None, help="PPR decay")
    group.add_argument("--k", type=int, default=None, help="Matrix power")
    group.add_argument("--normalized", action="store_true", help="PPR on the transition matrix instead of A")
    group.add_argument("--seed", type=int, default=None, help="Random seed")
    group.add_argument("--n-jobs", type=int, default=None, help="Parallel workers (default PROXEMBED_N_JOBS)")
    group.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="Override any dotted config key")


def config_from_args(args: argparse.Namespace, settings: Settings) -> PipelineConfig:
    overrides: Dict[str, Any] = {
        "proximity.name": args.proximity,
        "nonlinearity.name": args.nonlinearity,
        "embedding.name": args.embedding,
        "embedding.dimension": args.dimension,
        "scales": args.scales,
        "proximity.T": args.T,
        "proximity.b": args.b,
        "proximity.s": args.s,
        "proximity.a": args.a,
        "proximity.c": args.c,
        "proximity.beta": args.beta,
        "proximity.k": args.k,
        "proximity.normalized": "true" if args.normalized else None,
        "seed": args.seed,
        "n_jobs": args.n_jobs,
    }
    if args.embedding is not None and args.dimension is None:
        # a new embedding function brings its own default width
        overrides["embedding.dimension"] = "none"
    if args.nonlinearity is not None:
        overrides["nonlinearity.percentile"] = "none"
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got '{item}'")
        overrides[key.strip()] = value.strip()
    return load_config(args.preset, args.config, overrides, defaults={"n_jobs": settings.n_jobs})


def load_graph_arguments(args: argparse.Namespace) -> Graph:
    graph = load_edge_list(args.graph, weighted=args.weighted or args.weight_last, weight_last=args.weight_last)
    if getattr(args, "labels", None):
        graph = load_labels(args.labels, graph)
    return graph


def cmd_node_embed(args: argparse.Namespace, settings: Settings) -> int:
    cfg = config_from_args(args, settings)
    graph = load_graph_arguments(args)
    banner("Node Embedding")
    print(f"Graph: {args.graph} (n={graph.n}, edges={graph.num_edges})")
    print(f"Method: {cfg.describe()}")

    embedding = run_pipeline(graph, cfg)
    save_embedding_csv(args.out, embedding, cfg, graph)
    if args.bundle:
        save_embedding_bundle(args.bundle, embedding, cfg)
    if args.matrix_out:
        save_matrix_csv(args.matrix_out, embedding.matrix)
    print(f"Embedding: {embedding.n} x {embedding.dimension} -> {args.out}")
    return 0


def cmd_graph_embed(args: argparse.Namespace, settings: Settings) -> int:
    cfg = config_from_args(args, settings)
    graph_ids, graphs, labels = load_graph_dataset(args.dataset)
    banner("Graph Embedding")
    print(f"Dataset: {args.dataset} ({len(graphs)} graphs)")
    print(f"Method: {cfg.describe()}")

    features = feature_matrix(embed_graph_set(graphs, cfg, progress=args.progress))
    baselines: Dict[str, np.ndarray] = {}
    requested = [name.strip() for name in args.baselines.split(",") if name.strip()] if args.baselines else []
    for name in requested:
        if name == "netlsd":
            scales = netlsd_scales(args.netlsd_scales)
            baselines["netlsd"] = np.vstack([netlsd_features(g, scales).values for g in graphs])
        elif name == "retgk":
            baselines["retgk"] = np.vstack([retgk_features(g, args.retgk_max_k).values for g in graphs])
        else:
            raise ConfigError(f"Unknown baseline '{name}'. Expected netlsd or retgk.")

    save_features_csv(args.out, graph_ids, features, labels, cfg, baselines)
    print(f"Features: {features.shape[0]} x {features.shape[1]} -> {args.out}")
    return 0


def _node_embedding_for_eval(args: argparse.Namespace, settings: Settings) -> tuple:
    if args.graph is None or args.labels is None:
        raise ConfigError("node tasks need --graph and --labels")
    graph = load_graph_arguments(args)
    labels = graph.label_array()
    if args.embedding_file:
        if Path(args.embedding_file).suffix == ".joblib":
            bundle = load_embedding_bundle(args.embedding_file)
            features = np.asarray(bundle["matrix"], dtype=float)
            if features.shape[0] != graph.n:
                raise GraphDataError(f"Bundle holds {features.shape[0]} rows, the graph has {graph.n} nodes")
            return features, labels, bundle["config"]
        frame, cfg = load_embedding_csv(args.embedding_file)
        index = {str(graph.node_id(i)): i for i in range(graph.n)}
        order = [index.get(str(node)) for node in frame["node"]]
        if any(i is None for i in order) or len(order) != graph.n:
            raise GraphDataError("Embedding rows do not match the graph's nodes")
        features = np.zeros((graph.n, frame.shape[1] - 1))
        features[order] = frame.drop(columns=["node"]).to_numpy(dtype=float)
        return features, labels, cfg
    cfg = config_from_args(args, settings)
    return run_pipeline(graph, cfg).matrix, labels, cfg


def cmd_eval(args: argparse.Namespace, settings: Settings) -> int:
    banner(f"Evaluation: {args.task}")
    if args.task == "graph-classify":
        if args.dataset is None:
            raise ConfigError("graph-classify needs --dataset")
        cfg = config_from_args(args, settings)
        _, graphs, labels = load_graph_dataset(args.dataset)
        if labels is None:
            raise GraphDataError(f"Dataset {args.dataset} has no labels file")
        features = embed_graph_set(graphs, cfg, progress=args.progress)
        report = classify_graphs(features, labels, args.folds, args.trials, cfg.seed, cfg.n_jobs, cfg)
    else:
        features, labels, cfg = _node_embedding_for_eval(args, settings)
        seed = args.seed if args.seed is not None else (cfg.seed if cfg is not None else 42)
        if args.task == "node-classify":
            reports = [classify_nodes(features, labels, args.train_fraction, seed + split, cfg) for split in range(args.splits)]
            scores = [r.metrics["micro_f1"] for r in reports]
            report = EvalReport(
                task="node_classification",
                metrics={"micro_f1": float(np.mean(scores)), "micro_f1_std": float(np.std(scores))},
                config=cfg,
                seed=seed,
                details={"splits": args.splits, "per_split": scores},
            )
        else:
            k = args.clusters or int(np.unique(labels).size)
            report = cluster_nodes(features, k, labels, cfg)

    for name, value in report.metrics.items():
        print(f"  {name}: {value:.4f}")
    if args.out:
        save_report_json(args.out, report.to_dict())
        print(f"Report: {args.out}")
    return 0


def cmd_sweep(args: argparse.Namespace, settings: Settings) -> int:
    cfg = config_from_args(args, settings)
    graph = load_graph_arguments(args)
    if graph.labels is None:
        raise ConfigError("sweep needs --labels")
    banner(f"Sweep: {args.mode}")
    if args.mode == "grid":
        operators = [parse_operator(name) for name in args.operators.split(",")] if args.operators else None
        filters = [spec.strip() for spec in args.filters.split(",")] if args.filters else list(DEFAULT_FILTERS)
        for spec in filters:
            parse_filter(spec)
        results = run_design_grid(graph, cfg, args.task, operators, filters, args.splits, cfg.n_jobs, args.progress)
    else:
        results = run_order_sweep(graph, cfg, parse_operator(args.order_operator), args.max_k, args.task, args.splits, cfg.n_jobs, args.progress)

    print(results.drop(columns=["error"]).to_string(index=False, float_format=lambda v: f"{v:.4f}"))
    save_table_csv(args.out, results)
    print(f"\nResults: {args.out}")
    if args.mode == "grid":
        ranks = rank_design_choices(results)
        print("\n" + "-" * 70)
        print("Design choices (average rank, average score, max score)")
        print("-" * 70)
        print(ranks.to_string(index=False, float_format=lambda v: f"{v:.4f}"))
        if args.ranks_out:
            save_table_csv(args.ranks_out, ranks)
            print(f"Ranks: {args.ranks_out}")
    return 0


def cmd_synth(args: argparse.Namespace, settings: Settings) -> int:
    banner("Synthetic Data")
    if args.graph_set:
        graphs, labels = generate_graph_families(args.per_class, args.seed)
        save_graph_dataset(args.graph_set, graphs, labels)
        print(f"Graph dataset: {len(graphs)} graphs -> {args.graph_set}")
        return 0
    if not args.out_edges or not args.out_labels:
        raise ConfigError("synth needs --out-edges and --out-labels (or --graph-set)")
    role_graph = generate_role_graph(args.shape, args.n_shapes, args.cycle_len, args.noise, args.seed, args.granularity)
    save_edge_list(args.out_edges, role_graph.graph)
    save_labels(args.out_labels, role_graph.graph)
    print(f"Graph: n={role_graph.graph.n}, edges={role_graph.graph.num_edges}")
    for name, count in role_graph.role_counts().items():
        print(f"  {name}: {count}")
    return 0


def cmd_diagnose(args: argparse.Namespace, settings: Settings) -> int:
    cfg = config_from_args(args, settings)
    graph = load_graph_arguments(args)
    operators = [parse_operator(name) for name in args.operators.split(",")] if args.operators else list(Operator)
    filters = [spec.strip() for spec in args.filters.split(",")] if args.filters else list(DEFAULT_FILTERS)
    out_dir = Path(args.out_dir)
    banner("Row Statistics")

    summary: List[Dict[str, Any]] = []
    for operator in operators:
        params = cfg.proximity_params() if operator is cfg.proximity.operator else {}
        try:
            proximity = compute_proximity(graph, operator.value, **params)
        except ProxembedError as exc:
            logger.warning("Skipping %s: %s", operator.label, exc)
            continue
        for spec in filters:
            name, percentile = parse_filter(spec)
            try:
                filtered = apply_filter(proximity, name, percentile)
            except ProxembedError as exc:
                logger.warning("Skipping %s | %s: %s", operator.label, spec, exc)
                continue
            stats = row_stats(filtered)
            stem = f"{operator.value}_{spec.replace(':', '')}"
            save_table_csv(out_dir / f"{stem}_rows.csv", stats.to_frame())
            save_table_csv(out_dir / f"{stem}_hist.csv", row_stats_histogram(stats, args.bins))
            if args.save_matrices:
                save_matrix_csv(out_dir / f"{stem}_matrix.csv", filtered.matrix)
            summary.append({
                "proximity": operator.label,
                "nonlinearity": spec,
                "sum_mean": float(stats.sums.mean()),
                "variance_mean": float(stats.variances.mean()),
                "entropy_mean": float(stats.entropies.mean()),
                "zero_rows": int(stats.zero_rows.sum()),
            })

    table = pd.DataFrame(summary)
    save_table_csv(out_dir / "summary.csv", table)
    print(table.to_string(index=False, float_format=lambda v: f"{v:.4f}"))
    print(f"\nRow statistics: {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(prog="proxembed", description="Node and graph embeddings from proximity, nonlinearity and embedding choices")
    parser.add_argument("--log-level", type=str, default=None, help="DEBUG | INFO | WARNING | ERROR")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    def graph_inputs(p: argparse.ArgumentParser, required: bool = True) -> None:
        p.add_argument("--graph", type=str, required=required, default=None, help="Edge list file")
        p.add_argument("--weighted", action="store_true", help="Edge lines carry a weight: 'u w v'")
        p.add_argument("--weight-last", action="store_true", help="Weighted lines are 'u v w' instead")
        p.add_argument("--labels", type=str, default=None, help="Label file: 'node_id label' lines")

    p = sub.add_parser("node-embed", help="Embed the nodes of one graph")
    graph_inputs(p)
    add_config_arguments(p)
    p.add_argument("--out", type=str, required=True, help="Embedding CSV path")
    p.add_argument("--bundle", type=str, default=None, help="Optional joblib bundle path")
    p.add_argument("--matrix-out", type=str, default=None, help="Also write the bare matrix, rows in node index order")
    p.set_defaults(handler=cmd_node_embed)

    p = sub.add_parser("graph-embed", help="Mean-pooled features for a graph dataset")
    p.add_argument("--dataset", type=str, required=True, help="Dataset directory with index.txt")
    add_config_arguments(p)
    p.add_argument("--out", type=str, required=True, help="Feature CSV path")
    p.add_argument("--baselines", type=str, default=None, help="Comma-separated: netlsd,retgk")
    p.add_argument("--netlsd-scales", type=int, default=5, help="Number of log-spaced heat scales")
    p.add_argument("--retgk-max-k", type=int, default=5, help="Longest return walk")
    p.add_argument("--progress", action="store_true", help="Show a progress bar")
    p.set_defaults(handler=cmd_graph_embed)

    p = sub.add_parser("eval", help="Downstream evaluation")
    p.add_argument("--task", type=str, required=True, choices=["node-classify", "node-cluster", "graph-classify"])
    graph_inputs(p, required=False)
    p.add_argument("--dataset", type=str, default=None, help="Dataset directory (graph-classify)")
    p.add_argument("--embedding-file", type=str, default=None, help="Use a saved embedding CSV or .joblib bundle instead of embedding")
    add_config_arguments(p)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--splits", type=int, default=1, help="Random splits to average (node-classify)")
    p.add_argument("--clusters", type=int, default=None, help="Cluster count (default: number of labels)")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--out", type=str, default=None, help="Report JSON path")
    p.add_argument("--progress", action="store_true", help="Show a progress bar")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("sweep", help="Design grid or proximity-order sweep")
    graph_inputs(p)
    add_config_arguments(p)
    p.add_argument("--mode", type=str, default="grid", choices=["grid", "order"])
    p.add_argument("--task", type=str, default="classify", choices=["classify", "cluster"])
    p.add_argument("--operators", type=str, default=None, help="Comma-separated proximity subset (grid)")
    p.add_argument("--filters", type=str, default=None, help="Comma-separated nonlinearities (grid)")
    p.add_argument("--order-operator", type=str, default="rw_pow", help="adj_pow | rw_pow (order)")
    p.add_argument("--max-k", type=int, default=5)
    p.add_argument("--splits", type=int, default=5)
    p.add_argument("--out", type=str, required=True, help="Results CSV path")
    p.add_argument("--ranks-out", type=str, default=None, help="Design-choice ranking CSV path")
    p.add_argument("--progress", action="store_true", help="Show a progress bar")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("synth", help="Generate synthetic graphs")
    p.add_argument("--shape", type=str, default="house", choices=["house", "fan", "star"])
    p.add_argument("--n-shapes", type=int, default=5)
    p.add_argument("--cycle-len", type=int, default=30)
    p.add_argument("--noise", type=float, default=0.0, help="Fraction of extra random edges")
    p.add_argument("--granularity", type=str, default="orbit", choices=["orbit", "coarse"])
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out-edges", type=str, default=None)
    p.add_argument("--out-labels", type=str, default=None)
    p.add_argument("--graph-set", type=str, default=None, help="Write a two-family graph dataset directory instead")
    p.add_argument("--per-class", type=int, default=50)
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("diagnose", help="Row statistics per (proximity, nonlinearity)")
    graph_inputs(p)
    add_config_arguments(p)
    p.add_argument("--operators", type=str, default=None, help="Comma-separated proximity subset")
    p.add_argument("--filters", type=str, default=None, help="Comma-separated nonlinearities")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--save-matrices", action="store_true", help="Also write every filtered matrix")
    p.add_argument("--out-dir", type=str, required=True)
    p.set_defaults(handler=cmd_diagnose)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    try:
        settings = Settings.from_env()
        args = build_parser().parse_args(argv)
        level = (args.log_level or settings.log_level).upper()
        logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT)
        return args.handler(args, settings)
    except ProxembedError as e:
        print(f"\nError: {e}", file=sys.stderr)
        return exit_code_for(e)
    except (FileNotFoundError, np.linalg.LinAlgError) as e:
        print(f"\nError: {e}", file=sys.stderr)
        return 2 if isinstance(e, FileNotFoundError) else 3


if __name__ == "__main__":
    sys.exit(main())
