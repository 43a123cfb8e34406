"""Embedding functions Y = phi(S~) and multiscale concatenation.

* ``svd_embed``  - positional embedding ``U_d sqrt(Sigma_d)``
* ``cfs_embed``  - structural embedding by sampling each node's empirical
  characteristic function of its proximity scores
* ``diag_embed`` - the diagonal of a proximity matrix as a single column
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from .exceptions import ConfigError
from .nonlinearity import FilteredMatrix
from .proximity import ProximityMatrix

logger = logging.getLogger(__name__)

DEFAULT_LANDMARK_MAX = 100.0


class EmbeddingKind(str, Enum):
	POSITIONAL = "positional"
	STRUCTURAL = "structural"
	DIAGONAL = "diagonal"


@dataclass(frozen=True)
class BlockProvenance:
	"""Where one concatenated block of columns came from."""

	operator: str
	params: Tuple[Tuple[str, object], ...]
	filter: str
	scale: Optional[float] = None
	width: int = 0

	def describe(self) -> str:
		inner = ",".join(f"{key}={value}" for key, value in self.params)
		text = f"{self.operator}({inner})|{self.filter}|width={self.width}"
		return text if self.scale is None else f"{text}|scale={self.scale:g}"


@dataclass(frozen=True)
class EmbeddingMatrix:
	matrix: np.ndarray
	kind: EmbeddingKind
	provenance: Tuple[BlockProvenance, ...] = field(default_factory=tuple)

	@property
	def n(self) -> int:
		return int(self.matrix.shape[0])

	@property
	def dimension(self) -> int:
		return int(self.matrix.shape[1])


def _provenance(source: Union[FilteredMatrix, ProximityMatrix, np.ndarray], width: int, scale: Optional[float]) -> Tuple[BlockProvenance, ...]:
	if isinstance(source, FilteredMatrix):
		proximity = source.source
		filter_name = source.describe()
	elif isinstance(source, ProximityMatrix):
		proximity = source
		filter_name = "identity"
	else:
		return (BlockProvenance("matrix", (), "identity", scale, width),)
	if proximity is None:
		return (BlockProvenance("matrix", (), filter_name, scale, width),)
	params = tuple(sorted(proximity.params.items()))
	return (BlockProvenance(proximity.operator.label, params, filter_name, scale, width),)


def _matrix(source: Union[FilteredMatrix, ProximityMatrix, np.ndarray]) -> np.ndarray:
	if isinstance(source, (FilteredMatrix, ProximityMatrix)):
		return np.asarray(source.matrix, dtype=float)
	return np.asarray(source, dtype=float)


def svd_embed(s: Union[FilteredMatrix, np.ndarray], d: int, scale: Optional[float] = None) -> EmbeddingMatrix:
	"""Rank-d truncated SVD embedding ``Y = U_d diag(sqrt(sigma_d))``.

	Columns follow descending singular values. Each column is sign-fixed so
	its largest-magnitude entry is positive.

	Raises
	------
	ConfigError
		If ``d`` is not in ``1..n``.
	"""

	matrix = _matrix(s)
	n = matrix.shape[0]
	if not 1 <= d <= n:
		raise ConfigError(f"SVD dimension d must satisfy 1 <= d <= n={n}, got {d}")
	u, sigma, _ = linalg.svd(matrix, full_matrices=False)
	u = u[:, :d]
	pivot = np.argmax(np.abs(u), axis=0)
	signs = np.sign(u[pivot, np.arange(d)])
	signs[signs == 0] = 1.0
	y = (u * signs) * np.sqrt(sigma[:d])
	return EmbeddingMatrix(y, EmbeddingKind.POSITIONAL, _provenance(s, d, scale))


def cfs_landmarks(d: int, landmark_max: float = DEFAULT_LANDMARK_MAX, include_zero: bool = False) -> np.ndarray:
	"""The d/2 sampling points of the characteristic function.

	By default ``t_j = j * landmark_max / (d/2)`` for ``j = 1..d/2`` (t = 0
	carries no information); ``include_zero`` spaces them over
	``[0, landmark_max]`` inclusive instead.
	"""

	if d < 2 or d % 2:
		raise ConfigError(f"CFS dimension must be a positive even number, got {d}")
	count = d // 2
	if include_zero:
		return np.linspace(0.0, landmark_max, count)
	return np.arange(1, count + 1) * (landmark_max / count)


def cfs_embed(
	s: Union[FilteredMatrix, np.ndarray],
	d: int,
	landmark_max: float = DEFAULT_LANDMARK_MAX,
	include_zero: bool = False,
	normalize: bool = True,
	scale: Optional[float] = None,
) -> EmbeddingMatrix:
	"""Characteristic function sampling embedding.

	Row ``u`` is ``[Re phi_u(t_1), Im phi_u(t_1), ...]`` with
	``phi_u(t) = sum_v exp(i t S~[v, u])``, divided by ``n`` when
	``normalize`` is set. Each row depends only on the multiset of scores
	in column ``u``.
	"""

	matrix = _matrix(s)
	landmarks = cfs_landmarks(d, landmark_max, include_zero)
	n = matrix.shape[0]
	y = np.empty((n, d), dtype=float)
	for j, t in enumerate(landmarks):
		phase = t * matrix
		y[:, 2 * j] = np.cos(phase).sum(axis=0)
		y[:, 2 * j + 1] = np.sin(phase).sum(axis=0)
	if normalize and n:
		y /= n
	return EmbeddingMatrix(y, EmbeddingKind.STRUCTURAL, _provenance(s, d, scale))


def diag_embed(s: Union[ProximityMatrix, FilteredMatrix, np.ndarray], scale: Optional[float] = None) -> EmbeddingMatrix:
	"""Single-column embedding holding the diagonal of ``S``."""

	matrix = _matrix(s)
	return EmbeddingMatrix(np.diag(matrix).reshape(-1, 1).astype(float), EmbeddingKind.DIAGONAL, _provenance(s, 1, scale))


def multiscale_concat(blocks: Sequence[EmbeddingMatrix]) -> EmbeddingMatrix:
	"""Concatenate blocks column-wise in the given order.

	Raises
	------
	ConfigError
		If ``blocks`` is empty or the blocks disagree on row count or kind.
	"""

	if not blocks:
		raise ConfigError("multiscale_concat needs at least one block")
	if len(blocks) == 1:
		return blocks[0]
	first = blocks[0]
	provenance: List[BlockProvenance] = []
	for block in blocks:
		if block.n != first.n:
			raise ConfigError(f"Cannot concatenate embeddings with {first.n} and {block.n} rows")
		if block.kind is not first.kind:
			raise ConfigError(f"Cannot concatenate {first.kind.value} and {block.kind.value} embeddings")
		provenance.extend(block.provenance)
	matrix = np.hstack([block.matrix for block in blocks])
	return EmbeddingMatrix(matrix, first.kind, tuple(provenance))


__all__: Iterable[str] = [
	"EmbeddingKind",
	"BlockProvenance",
	"EmbeddingMatrix",
	"svd_embed",
	"cfs_landmarks",
	"cfs_embed",
	"diag_embed",
	"multiscale_concat",
]
