"""Error hierarchy for the proxembed package.

Each family maps onto one CLI exit status (see ``main.py``): configuration
problems exit with 1, data problems with 2 and numerical failures with 3.
"""

from __future__ import annotations

from typing import Any, Iterable, Optional


class ProxembedError(Exception):
	"""Base class for every error raised by proxembed."""

	exit_code: int = 1


class ConfigError(ProxembedError, ValueError):
	"""Invalid pipeline configuration or command-line usage."""

	exit_code = 1


class GraphDataError(ProxembedError, ValueError):
	"""Input graph or label data is malformed or unusable."""

	exit_code = 2


class EdgeListParseError(GraphDataError):
	"""An edge-list or label file line could not be parsed."""

	def __init__(self, path: Any, line_number: int, reason: str) -> None:
		self.path = path
		self.line_number = line_number
		super().__init__(f"{path}:{line_number}: {reason}")


class IsolatedNodeError(GraphDataError):
	"""An operation needs every node to have degree >= 1."""

	def __init__(self, node: Any, operation: str) -> None:
		self.node = node
		super().__init__(f"{operation} requires no isolated nodes; node {node!r} has degree 0")


class EmptyGraphError(GraphDataError):
	"""Graph has no nodes (or no edges where edges are required)."""


class EvaluationError(ProxembedError, ValueError):
	"""Downstream evaluation cannot run on the given labels or features."""

	exit_code = 2


class NumericalError(ProxembedError, ArithmeticError):
	"""A numerical stage failed or would produce non-finite output."""

	exit_code = 3


class AsymmetricMatrixError(NumericalError):
	"""A symmetric routine received a matrix that is not symmetric."""


class SingularMatrixError(NumericalError):
	"""A matrix that must be inverted is (numerically) singular."""


class DivergenceError(NumericalError):
	"""A series-defined operator would diverge for the given parameters."""


class NoPositiveEntryError(NumericalError):
	"""A filter needs at least one strictly positive entry."""


class NonFiniteError(NumericalError):
	"""A computed matrix contains NaN or infinite values."""


def exit_code_for(error: Optional[BaseException]) -> int:
	"""Map an exception onto the CLI exit status."""

	if isinstance(error, ProxembedError):
		return error.exit_code
	return 1


__all__: Iterable[str] = [
	"ProxembedError",
	"ConfigError",
	"GraphDataError",
	"EdgeListParseError",
	"IsolatedNodeError",
	"EmptyGraphError",
	"EvaluationError",
	"NumericalError",
	"AsymmetricMatrixError",
	"SingularMatrixError",
	"DivergenceError",
	"NoPositiveEntryError",
	"NonFiniteError",
	"exit_code_for",
]
