"""Node proximity operators S = pi(A).

Seven operators are provided. Each returns a :class:`ProximityMatrix` whose
matrix is dense, finite and read-only:

* ``ppmi``                 - (vol(G) / (bT)) (sum_{r=1..T} R^r) D^-1
* ``heat_kernel``          - U exp(-s Lambda) U^T
* ``fabp``                 - (I + aD - cA)^-1
* ``ppr``                  - (I - beta A)^-1 (beta A)
* ``lap_pinv_proximity``   - L+
* ``adj_power``            - A^k
* ``rw_power``             - R^k
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Iterable, Mapping, Optional, Tuple

import numpy as np
from scipy import linalg

from .exceptions import ConfigError, DivergenceError, EmptyGraphError, SingularMatrixError
from .graph_core import (
	Graph,
	adjacency,
	check_finite,
	laplacian,
	laplacian_pinv,
	require_no_isolated,
	rw_transition,
	spectral_radius,
	symmetric_eig,
)

logger = logging.getLogger(__name__)

ROUNDOFF_RTOL = 1e-12
FABP_MAX_CONDITION = 1e12
PPR_MARGIN = 1e-6


class Operator(str, Enum):
	PPMI = "ppmi"
	HK = "hk"
	FABP = "fabp"
	PPR = "ppr"
	LAP_PINV = "lap_pinv"
	ADJ_POW = "adj_pow"
	RW_POW = "rw_pow"

	@property
	def label(self) -> str:
		return _LABELS[self]

	@property
	def is_symmetric(self) -> bool:
		return self is not Operator.RW_POW


_LABELS = {
	Operator.PPMI: "PPMI",
	Operator.HK: "HK",
	Operator.FABP: "FaBP",
	Operator.PPR: "PPR",
	Operator.LAP_PINV: "LapPinv",
	Operator.ADJ_POW: "AdjPow",
	Operator.RW_POW: "RWPow",
}

# Parameter swept by multiscale embeddings; FaBP and L+ have none.
SCALE_PARAMETER: Dict[Operator, str] = {
	Operator.PPMI: "T",
	Operator.HK: "s",
	Operator.PPR: "beta",
	Operator.ADJ_POW: "k",
	Operator.RW_POW: "k",
}


@dataclass(frozen=True)
class ProximityMatrix:
	"""Dense n x n proximity matrix together with how it was produced."""

	matrix: np.ndarray
	operator: Operator
	params: Mapping[str, Any] = field(default_factory=dict)

	@property
	def n(self) -> int:
		return int(self.matrix.shape[0])

	def describe(self) -> str:
		if not self.params:
			return self.operator.label
		inner = ",".join(f"{key}={value}" for key, value in sorted(self.params.items()))
		return f"{self.operator.label}({inner})"


def _finalize(s: np.ndarray, operator: Operator, params: Mapping[str, Any], symmetric: Optional[bool] = None) -> ProximityMatrix:
	s = np.array(s, dtype=float)
	check_finite(s, f"{operator.label} proximity")
	if s.size:
		# round-off from solves and eigendecompositions is not proximity
		cutoff = ROUNDOFF_RTOL * float(np.abs(s).max())
		s[np.abs(s) <= cutoff] = 0.0
	if symmetric is None:
		symmetric = operator.is_symmetric
	if symmetric:
		s = 0.5 * (s + s.T)
	s.setflags(write=False)
	logger.debug("Computed %s proximity, shape=%s", operator.label, s.shape)
	return ProximityMatrix(matrix=s, operator=operator, params=dict(params))


def ppmi(g: Graph, T: int = 10, b: float = 1.0) -> ProximityMatrix:
	"""PPMI-style proximity computed exactly by dense powers of R.

	Parameters
	----------
	g : Graph
		Graph without isolated nodes.
	T : int, default=10
		Window size (number of random-walk steps summed).
	b : float, default=1.0
		Negative-sampling parameter; scales the result by 1/b.
	"""

	if T < 1:
		raise ConfigError(f"PPMI window size T must be >= 1, got {T}")
	if b < 1:
		raise ConfigError(f"PPMI negative sampling b must be >= 1, got {b}")
	a = adjacency(g)
	degrees = a.sum(axis=1)
	require_no_isolated(g, degrees, "ppmi")
	r = a / degrees[:, None]
	volume = float(a.sum())

	power = np.eye(g.n)
	total = np.zeros((g.n, g.n))
	for _ in range(int(T)):
		power = power @ r
		total += power
	s = (volume / (b * T)) * total / degrees[None, :]
	return _finalize(s, Operator.PPMI, {"T": int(T), "b": float(b)})


def heat_kernel(g: Graph, s: float = 0.1) -> ProximityMatrix:
	"""Heat kernel ``exp(-sL)`` via the Laplacian eigendecomposition."""

	if s < 0:
		raise ConfigError(f"Heat kernel scale s must be >= 0, got {s}")
	eigenvalues, eigenvectors = symmetric_eig(laplacian(g))
	kernel = (eigenvectors * np.exp(-s * eigenvalues)) @ eigenvectors.T
	return _finalize(kernel, Operator.HK, {"s": float(s)})


def fabp_default_params(g: Graph, c2_variant: str = "squared") -> Tuple[float, float]:
	"""Heuristic (a, c) for FaBP from the about-half homophily factor.

	``h = sqrt((-c1 + sqrt(c1^2 + 4 c2)) / (8 c2))`` with ``c1 = Tr(D) + 2``
	and ``c2 = Tr(D^2) - 1`` (``c2_variant="squared"``) or ``Tr(D) - 1``
	(``c2_variant="trace"``). Then ``a = 4h^2 / (1 - 4h^2)`` and
	``c = 2h / (1 - 4h^2)``.
	"""

	if g.num_edges == 0:
		raise EmptyGraphError("FaBP default parameters need at least one edge")
	degrees = adjacency(g).sum(axis=1)
	c1 = float(degrees.sum()) + 2.0
	if c2_variant == "squared":
		c2 = float((degrees ** 2).sum()) - 1.0
	elif c2_variant == "trace":
		c2 = float(degrees.sum()) - 1.0
	else:
		raise ConfigError(f"Unknown FaBP c2 variant '{c2_variant}'. Expected 'squared' or 'trace'.")
	if c2 <= 0:
		raise ConfigError(f"FaBP heuristic is degenerate (c2 = {c2} <= 0)")

	h = np.sqrt((-c1 + np.sqrt(c1 ** 2 + 4.0 * c2)) / (8.0 * c2))
	denominator = 1.0 - 4.0 * h ** 2
	return float(4.0 * h ** 2 / denominator), float(2.0 * h / denominator)


def fabp(g: Graph, a: float, c: float) -> ProximityMatrix:
	"""Linearized belief propagation ``(I + aD - cA)^-1``."""

	adj = adjacency(g)
	system = np.eye(g.n) + a * np.diag(adj.sum(axis=1)) - c * adj
	if g.n:
		condition = np.linalg.cond(system)
		if not np.isfinite(condition) or condition >= FABP_MAX_CONDITION:
			raise SingularMatrixError(f"I + aD - cA is singular (condition number {condition:.3e}) for a={a}, c={c}")
	s = linalg.solve(system, np.eye(g.n), assume_a="sym") if g.n else np.zeros((0, 0))
	return _finalize(s, Operator.FABP, {"a": float(a), "c": float(c)})


def ppr(g: Graph, beta: float = 0.01, normalized: bool = False) -> ProximityMatrix:
	"""Katz-form personalized PageRank ``(I - beta B)^-1 (beta B)``.

	``B`` is the adjacency matrix, or the transition matrix R when
	``normalized`` is set.

	Raises
	------
	DivergenceError
		If ``beta * rho(B) >= 1 - 1e-6``; the Neumann series would diverge.
	"""

	if not 0 < beta < 1:
		raise ConfigError(f"PPR decay beta must lie in (0, 1), got {beta}")
	base = rw_transition(g) if normalized else adjacency(g)
	rho = spectral_radius(base)
	if beta * rho >= 1.0 - PPR_MARGIN:
		raise DivergenceError(f"PPR diverges: beta * rho = {beta} * {rho:.6g} >= 1")
	scaled = beta * base
	s = linalg.solve(np.eye(g.n) - scaled, scaled) if g.n else np.zeros((0, 0))
	# (I - beta R)^-1 beta R is not symmetric unless the graph is regular
	return _finalize(s, Operator.PPR, {"beta": float(beta), "normalized": bool(normalized)}, symmetric=not normalized)


def lap_pinv_proximity(g: Graph) -> ProximityMatrix:
	return _finalize(laplacian_pinv(g), Operator.LAP_PINV, {})


def adj_power(g: Graph, k: int = 1) -> ProximityMatrix:
	"""Adjacency matrix power ``A^k``."""

	if k < 1:
		raise ConfigError(f"Matrix power k must be >= 1, got {k}")
	return _finalize(np.linalg.matrix_power(adjacency(g), int(k)), Operator.ADJ_POW, {"k": int(k)})


def rw_power(g: Graph, k: int = 1) -> ProximityMatrix:
	"""Random-walk transition matrix power ``R^k``; rows sum to one."""

	if k < 1:
		raise ConfigError(f"Matrix power k must be >= 1, got {k}")
	return _finalize(np.linalg.matrix_power(rw_transition(g), int(k)), Operator.RW_POW, {"k": int(k)})


def parse_operator(name: str) -> Operator:
	normalized = name.strip().lower().replace("-", "_")
	aliases = {"lappinv": "lap_pinv", "adj": "adj_pow", "rw": "rw_pow", "adjpow": "adj_pow", "rwpow": "rw_pow"}
	normalized = aliases.get(normalized, normalized)
	try:
		return Operator(normalized)
	except ValueError:
		choices = ", ".join(op.value for op in Operator)
		raise ConfigError(f"Unsupported proximity '{name}'. Expected one of: {choices}.") from None


def compute_proximity(g: Graph, name: str, **params: Any) -> ProximityMatrix:
	"""Dispatch to the operator named ``name`` with keyword parameters.

	FaBP without explicit ``a``/``c`` uses :func:`fabp_default_params`.
	Unknown keywords for the chosen operator are ignored.
	"""

	operator = parse_operator(name)
	builders: Dict[Operator, Callable[[], ProximityMatrix]] = {
		Operator.PPMI: lambda: ppmi(g, T=int(params.get("T", 10)), b=float(params.get("b", 1.0))),
		Operator.HK: lambda: heat_kernel(g, s=float(params.get("s", 0.1))),
		Operator.FABP: lambda: _fabp_from_params(g, params),
		Operator.PPR: lambda: ppr(g, beta=float(params.get("beta", 0.01)), normalized=bool(params.get("normalized", False))),
		Operator.LAP_PINV: lambda: lap_pinv_proximity(g),
		Operator.ADJ_POW: lambda: adj_power(g, k=int(params.get("k", 1))),
		Operator.RW_POW: lambda: rw_power(g, k=int(params.get("k", 1))),
	}
	return builders[operator]()


def _fabp_from_params(g: Graph, params: Mapping[str, Any]) -> ProximityMatrix:
	a, c = params.get("a"), params.get("c")
	if a is None or c is None:
		default_a, default_c = fabp_default_params(g, params.get("fabp_c2", "squared"))
		a = default_a if a is None else a
		c = default_c if c is None else c
	return fabp(g, float(a), float(c))


__all__: Iterable[str] = [
	"Operator",
	"ProximityMatrix",
	"SCALE_PARAMETER",
	"ppmi",
	"heat_kernel",
	"fabp",
	"fabp_default_params",
	"ppr",
	"lap_pinv_proximity",
	"adj_power",
	"rw_power",
	"parse_operator",
	"compute_proximity",
]
