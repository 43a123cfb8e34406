"""Graph representation, edge-list ingestion and the standard graph matrices.

Every proximity operator consumes the matrices built here: the adjacency
matrix A, the degree matrix D, the unnormalized Laplacian L = D - A, its
pseudoinverse L+ and the random-walk transition matrix R = D^-1 A.  All
matrices are dense ``numpy.ndarray`` objects; graphs are small enough
(a few thousand nodes) that sparse storage buys nothing.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from scipy import linalg

from .exceptions import (
	AsymmetricMatrixError,
	EdgeListParseError,
	GraphDataError,
	IsolatedNodeError,
	NonFiniteError,
)

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-9
PINV_RTOL = 1e-8

Edge = Tuple[int, int]


@dataclass(frozen=True)
class Graph:
	"""Immutable undirected graph on nodes ``0..n-1``.

	Parameters
	----------
	n : int
		Number of nodes.
	edges : tuple of (int, int)
		Unordered node pairs stored as ``(u, v)`` with ``u < v``, sorted,
		without duplicates or self-loops.
	weights : tuple of float, optional
		Positive weight per edge (same order as ``edges``). ``None`` means
		every edge has weight 1.0.
	labels : mapping, optional
		Node index -> integer class.
	node_ids : tuple, optional
		Original identifier of every node, as read from an input file.
	"""

	n: int
	edges: Tuple[Edge, ...] = ()
	weights: Optional[Tuple[float, ...]] = None
	labels: Optional[Mapping[int, int]] = None
	node_ids: Optional[Tuple[Any, ...]] = None
	_id_index: Dict[Any, int] = field(default_factory=dict, init=False, repr=False, compare=False)

	def __post_init__(self) -> None:
		if self.n < 0:
			raise GraphDataError(f"Node count must be non-negative, got {self.n}")
		seen = set()
		previous: Optional[Edge] = None
		for u, v in self.edges:
			if u == v:
				raise GraphDataError(f"Self-loop on node {u} is not allowed")
			if not (0 <= u < v < self.n):
				raise GraphDataError(f"Edge ({u}, {v}) must satisfy 0 <= u < v < n={self.n}")
			if (u, v) in seen:
				raise GraphDataError(f"Duplicate edge ({u}, {v})")
			if previous is not None and (u, v) < previous:
				raise GraphDataError("Edges must be sorted; build graphs with Graph.from_edges")
			seen.add((u, v))
			previous = (u, v)
		if self.weights is not None:
			if len(self.weights) != len(self.edges):
				raise GraphDataError("weights must have one entry per edge")
			if any(not np.isfinite(w) or w <= 0 for w in self.weights):
				raise GraphDataError("Edge weights must be positive finite reals")
		if self.labels is not None:
			missing = [i for i in self.labels if not 0 <= i < self.n]
			if missing:
				raise GraphDataError(f"Labels reference unknown nodes: {missing[:5]}")
		if self.node_ids is not None:
			if len(self.node_ids) != self.n:
				raise GraphDataError("node_ids must have one entry per node")
			index = {node_id: i for i, node_id in enumerate(self.node_ids)}
			if len(index) != self.n:
				raise GraphDataError("node_ids must be unique")
			self._id_index.update(index)

	@classmethod
	def from_edges(
		cls,
		n: int,
		edges: Iterable[Sequence[int]],
		weights: Optional[Iterable[float]] = None,
		labels: Optional[Mapping[int, int]] = None,
		node_ids: Optional[Sequence[Any]] = None,
	) -> "Graph":
		"""Build a graph from arbitrary node pairs.

		Pairs are normalized to ``u < v`` and duplicates (in either
		direction) collapse onto their first occurrence. Self-loops raise.
		"""

		edge_list = [(int(u), int(v)) for u, v in edges]
		weight_list = [1.0] * len(edge_list) if weights is None else [float(w) for w in weights]
		if len(weight_list) != len(edge_list):
			raise GraphDataError("weights must have one entry per edge")

		unique: Dict[Edge, float] = {}
		for (u, v), w in zip(edge_list, weight_list):
			if u == v:
				raise GraphDataError(f"Self-loop on node {u} is not allowed")
			key = (u, v) if u < v else (v, u)
			unique.setdefault(key, w)

		ordered = sorted(unique)
		stored_weights = None if weights is None else tuple(unique[e] for e in ordered)
		return cls(
			n=int(n),
			edges=tuple(ordered),
			weights=stored_weights,
			labels=dict(labels) if labels is not None else None,
			node_ids=tuple(node_ids) if node_ids is not None else None,
		)

	@classmethod
	def from_networkx(cls, graph: nx.Graph, labels: Optional[Mapping[Any, int]] = None) -> "Graph":
		"""Convert a networkx graph, indexing nodes in iteration order."""

		nodes = list(graph.nodes())
		index = {node: i for i, node in enumerate(nodes)}
		edges = []
		weights = []
		weighted = any("weight" in data for _, _, data in graph.edges(data=True))
		for u, v, data in graph.edges(data=True):
			if u == v:
				continue
			edges.append((index[u], index[v]))
			weights.append(float(data.get("weight", 1.0)))
		mapped_labels = None
		if labels is not None:
			mapped_labels = {index[node]: int(label) for node, label in labels.items()}
		return cls.from_edges(
			len(nodes),
			edges,
			weights=weights if weighted else None,
			labels=mapped_labels,
			node_ids=nodes,
		)

	def to_networkx(self) -> nx.Graph:
		graph = nx.Graph()
		graph.add_nodes_from(range(self.n))
		for (u, v), w in zip(self.edges, self.edge_weights()):
			graph.add_edge(u, v, weight=w)
		return graph

	@property
	def num_edges(self) -> int:
		return len(self.edges)

	@property
	def is_weighted(self) -> bool:
		return self.weights is not None

	def edge_weights(self) -> Tuple[float, ...]:
		return self.weights if self.weights is not None else (1.0,) * len(self.edges)

	def node_id(self, index: int) -> Any:
		"""Original identifier of node ``index`` (the index itself if none)."""

		return self.node_ids[index] if self.node_ids is not None else index

	def index_of(self, node_id: Any) -> int:
		"""Graph index of an original node identifier."""

		if self.node_ids is None:
			index = int(node_id)
			if not 0 <= index < self.n:
				raise GraphDataError(f"Unknown node {node_id!r}")
			return index
		try:
			return self._id_index[node_id]
		except KeyError:
			raise GraphDataError(f"Unknown node {node_id!r}") from None

	@property
	def id_map(self) -> Dict[Any, int]:
		"""Original identifier -> contiguous index."""

		return {self.node_id(i): i for i in range(self.n)}

	def degrees(self) -> np.ndarray:
		return adjacency(self).sum(axis=1)

	def label_array(self) -> np.ndarray:
		"""Labels as an int array ordered by node index."""

		if self.labels is None or len(self.labels) != self.n:
			raise GraphDataError("Graph labels must cover every node")
		return np.array([self.labels[i] for i in range(self.n)], dtype=int)

	def with_labels(self, labels: Mapping[int, int]) -> "Graph":
		return Graph(self.n, self.edges, self.weights, dict(labels), self.node_ids)

	def permute(self, permutation: Sequence[int]) -> "Graph":
		"""Relabel node ``i`` as ``permutation[i]``; adjacency becomes P A P^T."""

		perm = np.asarray(permutation, dtype=int)
		if sorted(perm.tolist()) != list(range(self.n)):
			raise GraphDataError("permutation must be a rearrangement of 0..n-1")
		edges = [(perm[u], perm[v]) for u, v in self.edges]
		labels = None
		if self.labels is not None:
			labels = {int(perm[i]): label for i, label in self.labels.items()}
		node_ids = None
		if self.node_ids is not None:
			reordered: List[Any] = [None] * self.n
			for i, node_id in enumerate(self.node_ids):
				reordered[perm[i]] = node_id
			node_ids = reordered
		return Graph.from_edges(self.n, edges, self.weights, labels, node_ids)

	def disjoint_union(self, other: "Graph") -> "Graph":
		"""Block-diagonal union; nodes of ``other`` are shifted by ``self.n``."""

		shift = self.n
		edges = list(self.edges) + [(u + shift, v + shift) for u, v in other.edges]
		weights = None
		if self.weights is not None or other.weights is not None:
			weights = list(self.edge_weights()) + list(other.edge_weights())
		return Graph.from_edges(self.n + other.n, edges, weights)


def load_edge_list(path: Union[str, Path], weighted: bool = False, weight_last: bool = False) -> Graph:
	"""Read a whitespace-separated edge list.

	Each non-comment line holds ``u v``, or ``u w v`` when ``weighted``
	(``u v w`` when ``weight_last`` is also set).
	Lines starting with ``#`` and blank lines are ignored. Node identifiers
	are reindexed to ``0..n-1``: numerically when every identifier is an
	integer, otherwise in order of first appearance. Self-loop lines are
	dropped with a warning; duplicate edges collapse.

	Raises
	------
	FileNotFoundError
		If ``path`` does not exist.
	EdgeListParseError
		On a malformed line, with its line number.
	"""

	path = Path(path)
	if not path.exists():
		raise FileNotFoundError(f"Edge list not found: {path}")

	expected = 3 if weighted else 2
	raw_edges: List[Tuple[str, str, float]] = []
	seen_tokens: List[str] = []
	self_loops = 0
	with path.open("r", encoding="utf-8") as handle:
		for line_number, line in enumerate(handle, start=1):
			stripped = line.strip()
			if not stripped or stripped.startswith("#"):
				continue
			tokens = stripped.split()
			if len(tokens) != expected:
				raise EdgeListParseError(path, line_number, f"expected {expected} tokens, got {len(tokens)}")
			weight = 1.0
			u, v = tokens[0], tokens[-1]
			if weighted:
				w_token = tokens[1]
				if weight_last:
					v, w_token = tokens[1], tokens[2]
				try:
					weight = float(w_token)
				except ValueError:
					raise EdgeListParseError(path, line_number, f"invalid weight {w_token!r}") from None
				if not np.isfinite(weight) or weight <= 0:
					raise EdgeListParseError(path, line_number, f"weight must be positive, got {w_token!r}")
			seen_tokens.extend((u, v))
			if u == v:
				self_loops += 1
				continue
			raw_edges.append((u, v, weight))

	if self_loops:
		logger.warning("Dropped %d self-loop line(s) from %s", self_loops, path)

	node_ids = _order_node_ids(seen_tokens)
	index = {token: i for i, (token, _) in enumerate(node_ids)}
	edges = [(index[u], index[v]) for u, v, _ in raw_edges]
	weights = [w for _, _, w in raw_edges] if weighted else None
	graph = Graph.from_edges(len(node_ids), edges, weights, node_ids=[parsed for _, parsed in node_ids])
	logger.info("Loaded graph from %s: n=%d, edges=%d", path, graph.n, graph.num_edges)
	return graph


def _order_node_ids(tokens: Sequence[str]) -> List[Tuple[str, Any]]:
	"""Distinct tokens paired with their parsed identifier, in index order."""

	distinct = list(dict.fromkeys(tokens))
	try:
		parsed = [(token, int(token)) for token in distinct]
	except ValueError:
		return [(token, token) for token in distinct]
	if len({value for _, value in parsed}) != len(parsed):
		# "01" and "1" would collide as integers
		return [(token, token) for token in distinct]
	return sorted(parsed, key=lambda item: item[1])


def load_labels(path: Union[str, Path], graph: Graph) -> Graph:
	"""Attach ``node_id label`` lines to ``graph``, returning a new graph."""

	path = Path(path)
	if not path.exists():
		raise FileNotFoundError(f"Label file not found: {path}")

	lookup = {str(graph.node_id(i)): i for i in range(graph.n)}
	labels: Dict[int, int] = {}
	with path.open("r", encoding="utf-8") as handle:
		for line_number, line in enumerate(handle, start=1):
			stripped = line.strip()
			if not stripped or stripped.startswith("#"):
				continue
			tokens = stripped.split()
			if len(tokens) != 2:
				raise EdgeListParseError(path, line_number, f"expected 'node label', got {len(tokens)} tokens")
			if tokens[0] not in lookup:
				raise EdgeListParseError(path, line_number, f"unknown node {tokens[0]!r}")
			try:
				labels[lookup[tokens[0]]] = int(tokens[1])
			except ValueError:
				raise EdgeListParseError(path, line_number, f"label must be an integer, got {tokens[1]!r}") from None

	logger.info("Loaded %d labels from %s", len(labels), path)
	return graph.with_labels(labels)


def adjacency(g: Graph) -> np.ndarray:
	"""Symmetric adjacency matrix with ``A[u, v] = weight``."""

	a = np.zeros((g.n, g.n), dtype=float)
	if g.edges:
		rows, cols = np.array(g.edges, dtype=int).T
		w = np.asarray(g.edge_weights(), dtype=float)
		a[rows, cols] = w
		a[cols, rows] = w
	return a


def degree_matrix(g: Graph) -> np.ndarray:
	return np.diag(adjacency(g).sum(axis=1))


def laplacian(g: Graph) -> np.ndarray:
	"""Unnormalized Laplacian ``L = D - A``; every row sums to zero."""

	a = adjacency(g)
	return np.diag(a.sum(axis=1)) - a


def rw_transition(g: Graph) -> np.ndarray:
	"""Random-walk transition matrix ``R = D^-1 A``.

	Raises
	------
	IsolatedNodeError
		Naming the first node of degree zero.
	"""

	a = adjacency(g)
	degrees = a.sum(axis=1)
	require_no_isolated(g, degrees, "rw_transition")
	return a / degrees[:, None]


def require_no_isolated(g: Graph, degrees: np.ndarray, operation: str) -> None:
	isolated = np.flatnonzero(degrees <= 0)
	if isolated.size:
		raise IsolatedNodeError(g.node_id(int(isolated[0])), operation)


def symmetric_eig(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
	"""Eigen-decomposition of a symmetric matrix.

	Returns
	-------
	eigenvalues : np.ndarray
		Ascending.
	eigenvectors : np.ndarray
		Orthonormal columns, ``m = U diag(eigenvalues) U^T``.

	Raises
	------
	AsymmetricMatrixError
		If ``m`` deviates from its transpose by more than 1e-9 (relative to
		its largest entry when that exceeds 1).
	"""

	m = np.asarray(m, dtype=float)
	if m.ndim != 2 or m.shape[0] != m.shape[1]:
		raise AsymmetricMatrixError(f"Expected a square matrix, got shape {m.shape}")
	check_finite(m, "symmetric_eig input")
	if m.size == 0:
		return np.zeros(0), np.zeros((0, 0))
	scale = max(1.0, float(np.abs(m).max()))
	deviation = float(np.abs(m - m.T).max())
	if deviation > SYMMETRY_TOL * scale:
		raise AsymmetricMatrixError(f"Matrix is not symmetric (max |m - m^T| = {deviation:.3e})")
	eigenvalues, eigenvectors = linalg.eigh(0.5 * (m + m.T))
	return eigenvalues, eigenvectors


def laplacian_pinv(g: Graph) -> np.ndarray:
	"""Moore-Penrose pseudoinverse of the Laplacian.

	Eigenvalues ``<= 1e-8 * max(eigenvalue)`` are treated as zero, so
	disconnected graphs (several zero eigenvalues) are handled and the
	empty graph maps to the zero matrix.
	"""

	eigenvalues, eigenvectors = symmetric_eig(laplacian(g))
	if g.n == 0:
		return np.zeros((0, 0))
	top = float(eigenvalues.max())
	if top <= 0:
		return np.zeros((g.n, g.n))
	keep = eigenvalues > PINV_RTOL * top
	inverse = np.zeros_like(eigenvalues)
	inverse[keep] = 1.0 / eigenvalues[keep]
	pinv = (eigenvectors * inverse) @ eigenvectors.T
	return 0.5 * (pinv + pinv.T)


def spectral_radius(m: np.ndarray, max_iter: int = 1000, tol: float = 1e-12) -> float:
	"""Power-iteration estimate of the spectral radius of a nonnegative matrix.

	The start vector is all-ones, which overlaps the Perron vector of any
	nonnegative matrix. The iterate norm ratio converges to the radius even
	for bipartite graphs, where +rho and -rho are both eigenvalues.
	"""

	m = np.asarray(m, dtype=float)
	n = m.shape[0]
	if n == 0:
		return 0.0
	x = np.full(n, 1.0 / np.sqrt(n))
	estimate = 0.0
	for _ in range(max_iter):
		y = m @ x
		norm = float(np.linalg.norm(y))
		if norm == 0.0:
			return 0.0
		if abs(norm - estimate) <= tol * norm:
			return norm
		estimate = norm
		x = y / norm
	return estimate


def check_finite(m: np.ndarray, what: str) -> np.ndarray:
	if not np.all(np.isfinite(m)):
		raise NonFiniteError(f"{what} contains NaN or infinite entries")
	return m


__all__: Iterable[str] = [
	"Graph",
	"load_edge_list",
	"load_labels",
	"adjacency",
	"degree_matrix",
	"laplacian",
	"rw_transition",
	"symmetric_eig",
	"laplacian_pinv",
	"spectral_radius",
	"check_finite",
	"require_no_isolated",
]
