"""Downstream evaluation of node and graph embeddings.

This module scores embeddings; classifiers are built in ``model_trainer``
and node splits come from ``utils.sampling``.

* ``classify_nodes``  - one-vs-rest logistic regression, micro-F1
* ``cluster_nodes``   - single-linkage agglomerative clustering scored by
  homogeneity, completeness and silhouette
* ``classify_graphs`` - linear SVM, stratified k-fold accuracy over trials
* ``row_stats``       - per-row sum, variance and entropy of a matrix
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy.stats import entropy
from sklearn.cluster import AgglomerativeClustering
from sklearn.metrics import (
	accuracy_score,
	completeness_score,
	f1_score,
	homogeneity_score,
	silhouette_score,
)
from sklearn.model_selection import StratifiedKFold

from .config import PipelineConfig
from .embedding import EmbeddingMatrix
from .exceptions import EvaluationError
from .graph_features import GraphFeatureVector, feature_matrix
from .model_trainer import train_node_classifier, tune_graph_classifier
from .utils.sampling import split_nodes

logger = logging.getLogger(__name__)

ZERO_ROW_ATOL = 1e-12

METRIC_RANGES = {
	"micro_f1": (0.0, 1.0),
	"homogeneity": (0.0, 1.0),
	"completeness": (0.0, 1.0),
	"silhouette": (-1.0, 1.0),
	"accuracy_mean": (0.0, 1.0),
	"accuracy_max": (0.0, 1.0),
}

FeatureInput = Union[EmbeddingMatrix, np.ndarray]


@dataclass(frozen=True)
class EvalReport:
	"""Metrics of one evaluation run; values are checked against their ranges."""

	task: str
	metrics: Dict[str, float]
	config: Optional[PipelineConfig] = None
	seed: Optional[int] = None
	details: Dict[str, Any] = field(default_factory=dict)

	def __post_init__(self) -> None:
		for name, value in self.metrics.items():
			if name not in METRIC_RANGES or np.isnan(value):
				continue
			low, high = METRIC_RANGES[name]
			if not low - 1e-9 <= value <= high + 1e-9:
				raise EvaluationError(f"Metric {name}={value} outside [{low}, {high}]")

	def to_dict(self) -> Dict[str, Any]:
		return {
			"task": self.task,
			"metrics": {key: float(value) for key, value in self.metrics.items()},
			"config": self.config.to_flat() if self.config is not None else None,
			"seed": self.seed,
			"details": self.details,
		}


@dataclass(frozen=True)
class RowStats:
	sums: np.ndarray
	variances: np.ndarray
	entropies: np.ndarray
	zero_rows: np.ndarray

	def to_frame(self) -> pd.DataFrame:
		return pd.DataFrame({
			"row": np.arange(len(self.sums)),
			"sum": self.sums,
			"variance": self.variances,
			"entropy": self.entropies,
			"zero_row": self.zero_rows,
		})


def _features(y: FeatureInput) -> np.ndarray:
	return np.asarray(y.matrix if isinstance(y, EmbeddingMatrix) else y, dtype=float)


def _check_labels(labels: Any, n: int) -> np.ndarray:
	labels = np.asarray(labels)
	if labels.shape[0] != n:
		raise EvaluationError(f"Expected {n} labels, got {labels.shape[0]}")
	if np.unique(labels).size < 2:
		raise EvaluationError("Evaluation needs at least two distinct labels")
	return labels


def classify_nodes(
	y: FeatureInput,
	labels: Any,
	train_fraction: float = 0.8,
	seed: int = 42,
	config: Optional[PipelineConfig] = None,
) -> EvalReport:
	"""Train on a stratified split of the nodes and report test micro-F1.

	Raises
	------
	EvaluationError
		If the labels hold a single class or do not cover every node.
	"""

	features = _features(y)
	labels = _check_labels(labels, features.shape[0])
	train_idx, test_idx = split_nodes(labels, train_fraction, seed)
	if np.unique(labels[train_idx]).size < 2:
		raise EvaluationError("Training split holds a single class")

	model = train_node_classifier(features[train_idx], labels[train_idx])
	predictions = model.predict(features[test_idx])
	micro_f1 = float(f1_score(labels[test_idx], predictions, average="micro"))
	logger.info("Node classification micro-F1 %.4f (train=%d, test=%d)", micro_f1, len(train_idx), len(test_idx))
	return EvalReport(
		task="node_classification",
		metrics={"micro_f1": micro_f1},
		config=config,
		seed=seed,
		details={"n_train": int(len(train_idx)), "n_test": int(len(test_idx))},
	)


def cluster_nodes(
	y: FeatureInput,
	k: int,
	true_roles: Any,
	config: Optional[PipelineConfig] = None,
) -> EvalReport:
	"""Single-linkage agglomerative clustering cut at ``k`` clusters.

	Silhouette is reported as 0.0 when it is undefined (a single cluster
	or one cluster per node).
	"""

	features = _features(y)
	n = features.shape[0]
	true_roles = np.asarray(true_roles)
	if true_roles.shape[0] != n:
		raise EvaluationError(f"Expected {n} roles, got {true_roles.shape[0]}")
	if not 1 <= k <= n:
		raise EvaluationError(f"Cluster count k must satisfy 1 <= k <= n={n}, got {k}")

	if k == 1:
		predicted = np.zeros(n, dtype=int)
	else:
		predicted = AgglomerativeClustering(n_clusters=k, linkage="single").fit_predict(features)

	found = np.unique(predicted).size
	silhouette = float(silhouette_score(features, predicted)) if 2 <= found <= n - 1 else 0.0
	metrics = {
		"homogeneity": float(homogeneity_score(true_roles, predicted)),
		"completeness": float(completeness_score(true_roles, predicted)),
		"silhouette": silhouette,
	}
	logger.info(
		"Clustering k=%d: homogeneity %.4f, completeness %.4f, silhouette %.4f",
		k,
		metrics["homogeneity"],
		metrics["completeness"],
		metrics["silhouette"],
	)
	return EvalReport(task="node_clustering", metrics=metrics, config=config, details={"k": int(k)})


def _run_fold(X: np.ndarray, y: np.ndarray, train_idx: np.ndarray, test_idx: np.ndarray, seed: int) -> float:
	tuned = tune_graph_classifier(X[train_idx], y[train_idx], seed=seed)
	predictions = tuned["tuned_model"].predict(X[test_idx])
	return float(accuracy_score(y[test_idx], predictions))


def classify_graphs(
	features: Union[Sequence[GraphFeatureVector], np.ndarray],
	labels: Any,
	folds: int = 10,
	trials: int = 5,
	seed: int = 42,
	n_jobs: int = 1,
	config: Optional[PipelineConfig] = None,
) -> EvalReport:
	"""Stratified k-fold accuracy of a tuned linear SVM, averaged over trials.

	Trial ``t`` shuffles folds with seed ``seed + t``; every fold picks C
	from {0.01, 0.1, 1, 10} by inner cross-validation on its training part.

	Raises
	------
	EvaluationError
		If a class has fewer graphs than ``folds``.
	"""

	X = feature_matrix(features) if not isinstance(features, np.ndarray) else np.asarray(features, dtype=float)
	y = _check_labels(labels, X.shape[0])
	if folds < 2 or trials < 1:
		raise EvaluationError(f"Need folds >= 2 and trials >= 1, got folds={folds}, trials={trials}")
	classes, counts = np.unique(y, return_counts=True)
	if counts.min() < folds:
		small = classes[int(np.argmin(counts))]
		raise EvaluationError(f"Class {small!r} has {counts.min()} graphs, fewer than folds={folds}")

	jobs = []
	for trial in range(trials):
		splitter = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed + trial)
		for fold, (train_idx, test_idx) in enumerate(splitter.split(X, y)):
			jobs.append((trial, train_idx, test_idx, seed + 1000 * trial + fold))

	scores = Parallel(n_jobs=n_jobs)(delayed(_run_fold)(X, y, tr, te, s) for _, tr, te, s in jobs)
	per_trial = [float(np.mean([score for (t, *_), score in zip(jobs, scores) if t == trial])) for trial in range(trials)]

	metrics = {
		"accuracy_mean": float(np.mean(per_trial)),
		"accuracy_std": float(np.std(per_trial)),
		"accuracy_max": float(np.max(per_trial)),
	}
	logger.info("Graph classification accuracy %.4f +/- %.4f", metrics["accuracy_mean"], metrics["accuracy_std"])
	return EvalReport(
		task="graph_classification",
		metrics=metrics,
		config=config,
		seed=seed,
		details={"folds": folds, "trials": trials, "per_trial": per_trial},
	)


def row_stats(s: Any) -> RowStats:
	"""Per-row sum, population variance and entropy.

	Entropy is taken over each row normalized to a probability vector after
	clamping negative entries to 0. Rows with no positive mass are flagged
	and get entropy 0.
	"""

	matrix = np.asarray(getattr(s, "matrix", s), dtype=float)
	sums = matrix.sum(axis=1)
	variances = matrix.var(axis=1)
	clamped = np.clip(matrix, 0.0, None)
	mass = clamped.sum(axis=1)
	zero_rows = mass <= ZERO_ROW_ATOL
	entropies = np.zeros(matrix.shape[0])
	if (~zero_rows).any():
		entropies[~zero_rows] = entropy(clamped[~zero_rows], axis=1)
	return RowStats(sums, variances, entropies, zero_rows)


def row_stats_histogram(stats: RowStats, bins: int = 20) -> pd.DataFrame:
	"""Histogram table (statistic, bin_left, bin_right, count) for plotting."""

	frames: List[pd.DataFrame] = []
	for name, values in (("sum", stats.sums), ("variance", stats.variances), ("entropy", stats.entropies)):
		counts, edges = np.histogram(values, bins=bins)
		frames.append(pd.DataFrame({
			"statistic": name,
			"bin_left": edges[:-1],
			"bin_right": edges[1:],
			"count": counts,
		}))
	return pd.concat(frames, ignore_index=True)


__all__: Iterable[str] = [
	"EvalReport",
	"RowStats",
	"classify_nodes",
	"cluster_nodes",
	"classify_graphs",
	"row_stats",
	"row_stats_histogram",
]
