"""Embedding pipeline orchestrator.

Composes the three stages of every embedding method in the framework:

1. Node proximity      S  = pi(A)          (``proximity``)
2. Nonlinear filter    S~ = sigma(S)       (``nonlinearity``)
3. Embedding function  Y  = phi(S~)        (``embedding``)

Multiscale configurations run the three stages once per scale and
concatenate the blocks in scale order.
"""

from __future__ import annotations

import logging
from typing import Iterable, List, Optional

from joblib import Parallel, delayed

from .config import PipelineConfig
from .embedding import EmbeddingMatrix, cfs_embed, diag_embed, multiscale_concat, svd_embed
from .exceptions import EmptyGraphError
from .graph_core import Graph
from .nonlinearity import FilteredMatrix, apply_filter
from .proximity import compute_proximity

logger = logging.getLogger(__name__)


def compute_filtered(g: Graph, cfg: PipelineConfig, scale: Optional[float] = None) -> FilteredMatrix:
	"""Stages 1 and 2 for a single scale."""

	proximity = compute_proximity(g, cfg.proximity.name, **cfg.proximity_params(scale))
	return apply_filter(proximity, cfg.nonlinearity.name, cfg.nonlinearity.percentile)


def embed_filtered(filtered: FilteredMatrix, cfg: PipelineConfig, scale: Optional[float] = None) -> EmbeddingMatrix:
	"""Stage 3 for a single scale."""

	emb = cfg.embedding
	if emb.name == "svd":
		n = filtered.matrix.shape[0]
		d = emb.dimension
		if d > n:
			logger.warning("SVD dimension %d exceeds node count %d; using d=%d", d, n, n)
			d = n
		return svd_embed(filtered, d, scale=scale)
	if emb.name == "cfs":
		return cfs_embed(
			filtered,
			emb.dimension,
			landmark_max=emb.landmark_max,
			include_zero=emb.include_zero,
			normalize=emb.normalize,
			scale=scale,
		)
	return diag_embed(filtered, scale=scale)


def _run_scale(g: Graph, cfg: PipelineConfig, scale: Optional[float]) -> EmbeddingMatrix:
	filtered = compute_filtered(g, cfg, scale)
	return embed_filtered(filtered, cfg, scale)


def run_pipeline(g: Graph, cfg: PipelineConfig, n_jobs: Optional[int] = None) -> EmbeddingMatrix:
	"""Embed the nodes of ``g`` with the method described by ``cfg``.

	Parameters
	----------
	g : Graph
		Input graph.
	cfg : PipelineConfig
		Proximity, nonlinearity and embedding choice, optionally with scales.
	n_jobs : int, optional
		Parallel workers for multiscale runs; defaults to ``cfg.n_jobs``.
		Results do not depend on it.

	Returns
	-------
	EmbeddingMatrix
		``n x d`` for single-scale configs, ``n x (d * len(scales))``
		otherwise (SVD blocks may be narrower when d is clamped to n).

	Raises
	------
	EmptyGraphError
		If ``g`` has no nodes.
	"""

	if g.n == 0:
		raise EmptyGraphError("Cannot embed a graph with no nodes")

	logger.info("Running pipeline on n=%d, edges=%d: %s", g.n, g.num_edges, cfg.describe())
	if not cfg.is_multiscale:
		return _run_scale(g, cfg, None)

	workers = cfg.n_jobs if n_jobs is None else n_jobs
	scales = list(cfg.scales or ())
	if workers == 1 or len(scales) == 1:
		blocks: List[EmbeddingMatrix] = [_run_scale(g, cfg, scale) for scale in scales]
	else:
		blocks = Parallel(n_jobs=workers)(delayed(_run_scale)(g, cfg, scale) for scale in scales)
	return multiscale_concat(blocks)


__all__: Iterable[str] = ["run_pipeline", "compute_filtered", "embed_filtered"]
