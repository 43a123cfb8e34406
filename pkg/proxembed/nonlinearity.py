"""Elementwise nonlinear filters applied to proximity matrices."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Tuple, Union

import numpy as np

from .exceptions import ConfigError, NoPositiveEntryError
from .proximity import Operator, ProximityMatrix

logger = logging.getLogger(__name__)

TIE_RTOL = 1e-9

MatrixLike = Union[ProximityMatrix, np.ndarray]


class FilterKind(str, Enum):
	IDENTITY = "identity"
	LOG_PPMI = "log_ppmi"
	LOG_GENERAL = "log_general"
	BIN_PERCENTILE = "bin"


@dataclass(frozen=True)
class FilteredMatrix:
	matrix: np.ndarray
	kind: FilterKind
	percentile: Optional[float] = None
	source: Optional[ProximityMatrix] = None

	def describe(self) -> str:
		if self.kind is FilterKind.BIN_PERCENTILE:
			return f"bin:{self.percentile:g}"
		return self.kind.value


def _unwrap(s: MatrixLike) -> Tuple[np.ndarray, Optional[ProximityMatrix]]:
	if isinstance(s, ProximityMatrix):
		return s.matrix, s
	return np.asarray(s, dtype=float), None


def identity(s: MatrixLike) -> FilteredMatrix:
	"""No nonlinearity; the input array is passed through untouched."""

	matrix, source = _unwrap(s)
	return FilteredMatrix(matrix, FilterKind.IDENTITY, source=source)


def log_ppmi(s: MatrixLike) -> FilteredMatrix:
	"""``log(max(S, 1))``; entries at or below 1 become 0."""

	matrix, source = _unwrap(s)
	return FilteredMatrix(np.log(np.maximum(matrix, 1.0)), FilterKind.LOG_PPMI, source=source)


def log_general(s: MatrixLike) -> FilteredMatrix:
	"""``log(S / min(S+))`` on positive entries, 0 elsewhere.

	``min(S+)`` is the smallest strictly positive entry, so the output is
	invariant to multiplying ``S`` by a positive constant.

	Raises
	------
	NoPositiveEntryError
		If no entry of ``S`` is positive.
	"""

	matrix, source = _unwrap(s)
	positive = matrix > 0
	if not positive.any():
		raise NoPositiveEntryError("log filter needs at least one positive entry")
	smallest = float(matrix[positive].min())
	out = np.zeros_like(matrix, dtype=float)
	out[positive] = np.log(matrix[positive] / smallest)
	return FilteredMatrix(out, FilterKind.LOG_GENERAL, source=source)


def binarize_percentile(s: MatrixLike, p: float) -> FilteredMatrix:
	"""Threshold at the nearest-rank p-th percentile of all n^2 entries.

	The threshold ``a`` is the ``ceil(p * N / 100)``-th smallest entry
	(at least the first). Entries ``<= a`` map to 0, entries ``> a`` to 1;
	entries within 1e-9 * max|S| of ``a`` count as ties and map to 0.
	"""

	if not 0 <= p < 100:
		raise ConfigError(f"Binarization percentile must lie in [0, 100), got {p}")
	matrix, source = _unwrap(s)
	out = np.zeros_like(matrix, dtype=float)
	if matrix.size:
		flat = matrix.ravel()
		rank = max(1, math.ceil(p * flat.size / 100.0))
		threshold = float(np.partition(flat, rank - 1)[rank - 1])
		slack = TIE_RTOL * float(np.abs(flat).max())
		out[matrix > threshold + slack] = 1.0
	return FilteredMatrix(out, FilterKind.BIN_PERCENTILE, percentile=float(p), source=source)


def parse_filter(spec: str) -> Tuple[str, Optional[float]]:
	"""Parse ``identity``, ``log`` or ``bin:p`` into (name, percentile)."""

	text = spec.strip().lower()
	if text in {"identity", "none"}:
		return "identity", None
	if text == "log":
		return "log", None
	if text.startswith("bin"):
		_, _, value = text.partition(":")
		try:
			percentile = float(value) if value else 50.0
		except ValueError:
			raise ConfigError(f"Invalid binarization percentile in '{spec}'") from None
		if not 0 <= percentile < 100:
			raise ConfigError(f"Binarization percentile must lie in [0, 100), got {percentile}")
		return "bin", percentile
	raise ConfigError(f"Unsupported nonlinearity '{spec}'. Expected identity, log or bin:p.")


def apply_filter(s: MatrixLike, name: str, percentile: Optional[float] = None) -> FilteredMatrix:
	"""Apply the filter ``name`` (identity | log | bin).

	``log`` resolves to :func:`log_ppmi` for PPMI sources and to
	:func:`log_general` for everything else.
	"""

	key = name.strip().lower()
	if key == "identity":
		return identity(s)
	if key == "log":
		if isinstance(s, ProximityMatrix) and s.operator is Operator.PPMI:
			return log_ppmi(s)
		return log_general(s)
	if key == "bin":
		return binarize_percentile(s, 50.0 if percentile is None else percentile)
	raise ConfigError(f"Unsupported nonlinearity '{name}'. Expected identity, log or bin.")


__all__: Iterable[str] = [
	"FilterKind",
	"FilteredMatrix",
	"identity",
	"log_ppmi",
	"log_general",
	"binarize_percentile",
	"parse_filter",
	"apply_filter",
]
