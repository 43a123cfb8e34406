"""Design-space sweeps and rank aggregation.

Runs the proximity x nonlinearity grid (7 x 5 = 35 cells) or a
proximity-order sweep, scores every cell on a downstream task and
summarizes each design choice by average rank, average score and best
score across the cells that use it.
"""

from __future__ import annotations

import logging
import time
from typing import Any, Dict, Iterable, Optional, Sequence

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from tqdm import tqdm

from .config import PipelineConfig
from .evaluator import classify_nodes, cluster_nodes
from .exceptions import ConfigError, ProxembedError
from .graph_core import Graph
from .pipeline import run_pipeline
from .proximity import SCALE_PARAMETER, Operator

logger = logging.getLogger(__name__)

DEFAULT_FILTERS: Sequence[str] = ("identity", "log", "bin:5", "bin:50", "bin:95")

MULTISCALE_DEFAULTS: Dict[Operator, Sequence[float]] = {
	Operator.PPMI: (1.0, 2.0, 5.0, 10.0, 20.0),
	Operator.HK: (0.01, 0.1, 1.0, 10.0, 100.0),
	Operator.PPR: (0.001, 0.0025, 0.005, 0.0075, 0.01),
	Operator.ADJ_POW: (1.0, 2.0, 3.0, 4.0, 5.0),
	Operator.RW_POW: (1.0, 2.0, 3.0, 4.0, 5.0),
}


def cell_config(base: PipelineConfig, operator: Operator, filter_spec: str) -> PipelineConfig:
	"""``base`` with the proximity and filter replaced.

	Operator parameters fall back to their defaults. When ``base`` is
	multiscale the cell uses the operator's default scale grid, or a single
	scale for operators without a scale parameter.
	"""

	flat = {key: value for key, value in base.to_flat().items() if not key.startswith(("proximity.", "nonlinearity."))}
	flat.pop("scales", None)
	flat["proximity.name"] = operator.value
	flat["nonlinearity.name"] = filter_spec
	if base.is_multiscale and operator in SCALE_PARAMETER:
		flat["scales"] = ",".join(repr(float(value)) for value in MULTISCALE_DEFAULTS[operator])
	return PipelineConfig.from_flat(flat)


def score_embedding(
	g: Graph,
	cfg: PipelineConfig,
	task: str,
	splits: int = 5,
	train_fraction: float = 0.8,
) -> Dict[str, float]:
	"""Embed ``g`` and score it; ``g.labels`` are the targets (classes or roles)."""

	labels = g.label_array()
	y = run_pipeline(g, cfg, n_jobs=1)
	if task == "classify":
		scores = [classify_nodes(y, labels, train_fraction, cfg.seed + split).metrics["micro_f1"] for split in range(splits)]
		return {"score": float(np.mean(scores)), "score_max": float(np.max(scores))}
	if task == "cluster":
		report = cluster_nodes(y, int(np.unique(labels).size), labels)
		return {
			"score": report.metrics["homogeneity"],
			"completeness": report.metrics["completeness"],
			"silhouette": report.metrics["silhouette"],
		}
	raise ConfigError(f"Unsupported sweep task '{task}'. Expected 'classify' or 'cluster'.")


def _run_cell(g: Graph, cfg: PipelineConfig, task: str, splits: int) -> Dict[str, Any]:
	row: Dict[str, Any] = {
		"proximity": cfg.proximity.operator.label,
		"nonlinearity": cfg.nonlinearity.spec(),
		"embedding": cfg.embedding.name,
		"scales": ",".join(f"{value:g}" for value in cfg.scales) if cfg.scales else "",
	}
	start = time.perf_counter()
	try:
		row.update(score_embedding(g, cfg, task, splits))
		row["error"] = ""
	except ProxembedError as exc:
		logger.warning("Sweep cell %s | %s failed: %s", row["proximity"], row["nonlinearity"], exc)
		row.update({"score": float("nan"), "error": str(exc)})
	row["seconds"] = time.perf_counter() - start
	return row


def _run_cells(g: Graph, configs: Sequence[PipelineConfig], task: str, splits: int, n_jobs: int, progress: bool) -> pd.DataFrame:
	if n_jobs == 1:
		rows = [_run_cell(g, cfg, task, splits) for cfg in tqdm(configs, desc="sweep", disable=not progress)]
	else:
		rows = Parallel(n_jobs=n_jobs)(delayed(_run_cell)(g, cfg, task, splits) for cfg in configs)
	return pd.DataFrame(rows)


def run_design_grid(
	g: Graph,
	base: PipelineConfig,
	task: str = "classify",
	operators: Optional[Sequence[Operator]] = None,
	filters: Sequence[str] = DEFAULT_FILTERS,
	splits: int = 5,
	n_jobs: int = 1,
	progress: bool = False,
) -> pd.DataFrame:
	"""Score every (proximity, nonlinearity) cell, in grid order."""

	operators = list(operators) if operators is not None else list(Operator)
	configs = [cell_config(base, operator, spec) for operator in operators for spec in filters]
	logger.info("Running design grid: %d cells, task=%s", len(configs), task)
	return _run_cells(g, configs, task, splits, n_jobs, progress)


def run_order_sweep(
	g: Graph,
	base: PipelineConfig,
	operator: Operator = Operator.RW_POW,
	max_k: int = 5,
	task: str = "classify",
	splits: int = 5,
	n_jobs: int = 1,
	progress: bool = False,
) -> pd.DataFrame:
	"""Multiscale embeddings concatenating powers 1..K for K = 1..max_k."""

	if operator not in (Operator.ADJ_POW, Operator.RW_POW):
		raise ConfigError(f"Order sweeps need adj_pow or rw_pow, got {operator.value}")
	if max_k < 1:
		raise ConfigError(f"max_k must be >= 1, got {max_k}")
	flat = {key: value for key, value in base.to_flat().items() if not key.startswith("proximity.")}
	flat["proximity.name"] = operator.value
	configs = []
	for order in range(1, max_k + 1):
		flat["scales"] = ",".join(str(float(k)) for k in range(1, order + 1))
		configs.append(PipelineConfig.from_flat(flat))
	frame = _run_cells(g, configs, task, splits, n_jobs, progress)
	frame.insert(0, "order", list(range(1, max_k + 1)))
	return frame


def rank_design_choices(results: pd.DataFrame, score: str = "score") -> pd.DataFrame:
	"""Average rank, average score and max score per proximity and per nonlinearity.

	Cells are ranked over the whole grid (1 = best, ties share the average
	rank, failed cells rank last).
	"""

	frame = results.copy()
	frame["rank"] = frame[score].rank(method="average", ascending=False, na_option="bottom")
	tables = []
	for group in ("proximity", "nonlinearity"):
		summary = (
			frame.groupby(group, sort=False)
			.agg(avg_rank=("rank", "mean"), avg_score=(score, "mean"), max_score=(score, "max"))
			.reset_index()
			.rename(columns={group: "choice"})
		)
		summary.insert(0, "group", group)
		tables.append(summary)
	return pd.concat(tables, ignore_index=True)


__all__: Iterable[str] = [
	"DEFAULT_FILTERS",
	"MULTISCALE_DEFAULTS",
	"cell_config",
	"score_embedding",
	"run_design_grid",
	"run_order_sweep",
	"rank_design_choices",
]
