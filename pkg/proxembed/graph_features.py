"""Graph-level features by mean-pooling node embeddings.

Two classic graph descriptors fall out as special cases of the pipeline
with a diagonal embedding function:

* heat trace signatures: ``(1/n) Tr exp(-sL)`` over a set of scales,
  i.e. the mean of ``diag_embed(heat_kernel(g, s))``;
* return probabilities: ``mean_i R^j[i, i]`` for ``j = 1..K``, i.e. the
  mean of ``diag_embed(rw_power(g, j))``.

``netlsd_features`` and ``retgk_features`` compute these directly from the
spectrum / sequential transition powers so the equivalence can be checked.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from .config import PipelineConfig, build
from .embedding import EmbeddingMatrix
from .exceptions import ConfigError, EmptyGraphError
from .graph_core import Graph, laplacian, rw_transition, symmetric_eig
from .pipeline import run_pipeline

logger = logging.getLogger(__name__)

DEFAULT_HEAT_SCALES: Tuple[float, ...] = (0.01, 0.1, 1.0, 10.0, 100.0)


@dataclass(frozen=True)
class GraphFeatureVector:
	values: np.ndarray
	n: int
	config: Optional[PipelineConfig] = None

	def __len__(self) -> int:
		return int(self.values.shape[0])


def aggregate_mean(y: EmbeddingMatrix, config: Optional[PipelineConfig] = None) -> GraphFeatureVector:
	"""Column means of the node embedding matrix."""

	if y.n == 0:
		raise EmptyGraphError("Cannot aggregate the embedding of a graph with no nodes")
	return GraphFeatureVector(y.matrix.mean(axis=0), y.n, config)


def netlsd_scales(count: int = 5, low: float = 1e-2, high: float = 1e2) -> Tuple[float, ...]:
	"""Log-spaced heat scales over ``[low, high]``; five scales give the default grid."""

	if count < 1:
		raise ConfigError(f"Need at least one scale, got {count}")
	return tuple(float(value) for value in np.logspace(np.log10(low), np.log10(high), count))


def netlsd_features(g: Graph, scales: Sequence[float] = DEFAULT_HEAT_SCALES) -> GraphFeatureVector:
	"""Normalized heat traces ``(1/n) sum_i exp(-s lambda_i)`` per scale."""

	if not scales:
		raise ConfigError("netlsd_features needs at least one scale")
	if g.n == 0:
		raise EmptyGraphError("Heat traces are undefined for a graph with no nodes")
	eigenvalues, _ = symmetric_eig(laplacian(g))
	values = np.array([np.exp(-float(s) * eigenvalues).mean() for s in scales])
	return GraphFeatureVector(values, g.n)


def retgk_features(g: Graph, max_k: int = 5) -> GraphFeatureVector:
	"""Mean return probabilities ``mean_i R^j[i, i]`` for ``j = 1..max_k``."""

	if max_k < 1:
		raise ConfigError(f"max_k must be >= 1, got {max_k}")
	if g.n == 0:
		raise EmptyGraphError("Return probabilities are undefined for a graph with no nodes")
	r = rw_transition(g)
	power = np.eye(g.n)
	values = np.empty(max_k)
	for j in range(max_k):
		power = power @ r
		values[j] = np.diag(power).mean()
	return GraphFeatureVector(values, g.n)


def _embed_one(g: Graph, cfg: PipelineConfig) -> GraphFeatureVector:
	return aggregate_mean(run_pipeline(g, cfg, n_jobs=1), cfg)


def embed_graph_set(
	graphs: Sequence[Graph],
	cfg: PipelineConfig,
	n_jobs: Optional[int] = None,
	progress: bool = False,
) -> List[GraphFeatureVector]:
	"""Mean-pooled features for every graph, in input order.

	Raises
	------
	ConfigError
		If ``cfg`` uses the SVD embedding; positional coordinates are not
		comparable across graphs.
	"""

	if cfg.embedding.name == "svd":
		raise ConfigError("Graph-level features need a structural (cfs) or diagonal embedding, not svd")

	workers = cfg.n_jobs if n_jobs is None else n_jobs
	logger.info("Embedding %d graphs with %s", len(graphs), cfg.describe())
	if workers == 1:
		features = [_embed_one(g, cfg) for g in tqdm(graphs, desc="graphs", disable=not progress)]
	else:
		features = Parallel(n_jobs=workers)(delayed(_embed_one)(g, cfg) for g in graphs)

	widths = {len(f) for f in features}
	if len(widths) > 1:
		raise ConfigError(f"Graph features have inconsistent widths {sorted(widths)}")
	return list(features)


def feature_matrix(features: Sequence[GraphFeatureVector]) -> np.ndarray:
	return np.vstack([f.values for f in features]) if features else np.zeros((0, 0))


def two_regular_graphs(n: int) -> List[Graph]:
	"""Every 2-regular graph on ``n`` nodes (disjoint unions of cycles), up to isomorphism."""

	graphs = []
	for parts in _cycle_partitions(n, 3):
		union = nx.disjoint_union_all([nx.cycle_graph(size) for size in parts])
		graphs.append(Graph.from_networkx(union))
	return graphs


def _cycle_partitions(n: int, smallest: int) -> Iterable[Tuple[int, ...]]:
	if n == 0:
		yield ()
		return
	for first in range(smallest, n + 1):
		for rest in _cycle_partitions(n - first, first):
			yield (first,) + rest


def default_witness_config(max_k: int = 5, dimension: int = 10) -> PipelineConfig:
	return build({
		"proximity": {"name": "rw_pow"},
		"nonlinearity": {"name": "identity"},
		"embedding": {"name": "cfs", "dimension": dimension},
		"scales": tuple(float(k) for k in range(1, max_k + 1)),
	})


def find_expressivity_witness(
	candidates: Sequence[Graph],
	max_k: int = 5,
	cfg: Optional[PipelineConfig] = None,
	tol: float = 1e-9,
	min_gap: float = 1e-3,
) -> Optional[Tuple[Graph, Graph, float]]:
	"""Search for two non-isomorphic graphs that return probabilities cannot tell apart.

	A witness pair has mean return probabilities equal within ``tol`` for
	every walk length up to ``max_k``, while the CFS graph features of
	``cfg`` differ by more than ``min_gap`` (max absolute difference).

	Returns
	-------
	tuple or None
		``(first, second, gap)`` for the first pair found, else ``None``.
	"""

	cfg = cfg or default_witness_config(max_k)
	candidates = [g for g in candidates if g.n and np.all(g.degrees() > 0)]
	signatures = [retgk_features(g, max_k).values for g in candidates]

	for i, j in itertools.combinations(range(len(candidates)), 2):
		if np.max(np.abs(signatures[i] - signatures[j])) > tol:
			continue
		first, second = candidates[i], candidates[j]
		if nx.is_isomorphic(first.to_networkx(), second.to_networkx()):
			continue
		left, right = embed_graph_set([first, second], cfg, n_jobs=1)
		gap = float(np.max(np.abs(left.values - right.values)))
		logger.debug("Candidate pair (%d, %d): CFS gap %.3e", i, j, gap)
		if gap > min_gap:
			logger.info("Expressivity witness found: n=%d vs n=%d, gap=%.4f", first.n, second.n, gap)
			return first, second, gap
	return None


__all__: Iterable[str] = [
	"GraphFeatureVector",
	"DEFAULT_HEAT_SCALES",
	"aggregate_mean",
	"netlsd_scales",
	"netlsd_features",
	"retgk_features",
	"embed_graph_set",
	"feature_matrix",
	"two_regular_graphs",
	"default_witness_config",
	"find_expressivity_witness",
]
