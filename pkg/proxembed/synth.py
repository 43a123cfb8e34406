"""Synthetic graphs with planted structural roles.

``generate_role_graph`` places copies of a small shape (house, fan or star)
on a cycle and labels every node with its structural role. Without noise,
nodes sharing a role are automorphically equivalent, which makes these
graphs the ground truth for structural embeddings.

``generate_graph_families`` builds a two-class graph classification set
(triangle-rich windmills vs. star trees) with random perturbations.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Sequence, Tuple

import networkx as nx
import numpy as np

from .exceptions import ConfigError
from .graph_core import Graph

logger = logging.getLogger(__name__)

SHAPE_SIZE = 5


class Shape(str, Enum):
	HOUSE = "house"
	FAN = "fan"
	STAR = "star"


@dataclass(frozen=True)
class RoleGraph:
	graph: Graph
	roles: Dict[int, int]
	role_names: Tuple[str, ...]

	def role_array(self) -> np.ndarray:
		return np.array([self.roles[i] for i in range(self.graph.n)], dtype=int)

	def role_counts(self) -> Dict[str, int]:
		counts = np.bincount(self.role_array(), minlength=len(self.role_names))
		return {name: int(count) for name, count in zip(self.role_names, counts)}


def _shape_gadget(shape: Shape) -> Tuple[List[Tuple[int, int]], List[str]]:
	"""Local edges and per-node role names; node 0 attaches to the cycle."""

	if shape is Shape.HOUSE:
		# 0 roof, 1-2 mids, 3-4 base; the mid chord closes the roof triangle
		edges = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 4), (3, 4)]
		return edges, ["house-roof", "house-mid", "house-mid", "house-base", "house-base"]
	if shape is Shape.FAN:
		# 0 apex, 1..5 leaves joined in a path
		leaves = range(1, SHAPE_SIZE + 1)
		edges = [(0, leaf) for leaf in leaves] + [(leaf, leaf + 1) for leaf in range(1, SHAPE_SIZE)]
		names = ["fan-apex"]
		for leaf in leaves:
			offset = min(leaf - 1, SHAPE_SIZE - leaf)
			names.append(f"fan-leaf{offset}")
		return edges, names
	edges = [(0, leaf) for leaf in range(1, SHAPE_SIZE + 1)]
	return edges, ["star-centre"] + ["star-leaf"] * SHAPE_SIZE


def _cycle_orbit_keys(anchors: Sequence[int], cycle_len: int) -> List[Tuple[int, ...]]:
	"""Orbit key per cycle position under the rotations and reflections fixing the anchors.

	The key is the smaller of the anchor indicator read forwards and
	backwards from the position; equal keys mean a symmetry of the cycle
	maps one position onto the other.
	"""

	marks = np.zeros(cycle_len, dtype=int)
	marks[list(anchors)] = 1
	keys = []
	for position in range(cycle_len):
		forward = tuple(np.roll(marks, -position).tolist())
		backward = tuple(np.roll(marks[::-1], position + 1).tolist())
		keys.append(min(forward, backward))
	return keys


def _cycle_roles(anchors: Sequence[int], cycle_len: int, granularity: str) -> List[str]:
	anchor_set = set(anchors)
	if granularity == "coarse":
		return ["cycle-anchor" if p in anchor_set else "cycle" for p in range(cycle_len)]

	bases = []
	for p in range(cycle_len):
		if p in anchor_set:
			bases.append("cycle-anchor")
			continue
		previous = max((a for a in anchors if a < p), default=anchors[-1] - cycle_len)
		following = min((a for a in anchors if a > p), default=anchors[0] + cycle_len)
		near, far = sorted((p - previous, following - p))
		bases.append(f"cycle-{near}-{far}")

	# uneven anchor spacing splits a distance pair into several orbits
	keys = _cycle_orbit_keys(anchors, cycle_len)
	orbits: Dict[str, List[Tuple[int, ...]]] = {}
	for base, key in zip(bases, keys):
		orbits.setdefault(base, [])
		if key not in orbits[base]:
			orbits[base].append(key)
	for base in orbits:
		orbits[base].sort()
	return [
		base if len(orbits[base]) == 1 else f"{base}-{orbits[base].index(key) + 1}"
		for base, key in zip(bases, keys)
	]


def generate_role_graph(
	shape: str = "house",
	n_shapes: int = 5,
	cycle_len: int = 30,
	noise_fraction: float = 0.0,
	seed: int = 42,
	role_granularity: str = "orbit",
) -> RoleGraph:
	"""Attach ``n_shapes`` copies of ``shape`` to a cycle and label roles.

	Parameters
	----------
	shape : str
		"house", "fan" or "star".
	n_shapes : int
		Number of shape copies; anchors sit at cycle positions
		``floor(i * cycle_len / n_shapes)``.
	cycle_len : int
		Length of the base cycle (at least 3 and at least ``n_shapes``).
	noise_fraction : float
		Adds ``floor(noise_fraction * |E|)`` uniformly sampled non-edges.
	seed : int
		Seed for the noise edges.
	role_granularity : str
		"orbit" labels every node with its automorphism orbit, also when
		the anchors are unevenly spaced; "coarse" keeps a single
		plain-cycle role.

	Returns
	-------
	RoleGraph
		Graph with labels equal to role ids, plus role names.
	"""

	try:
		kind = Shape(shape.strip().lower())
	except ValueError:
		raise ConfigError(f"Unsupported shape '{shape}'. Expected one of: house, fan, star.") from None
	if n_shapes < 1:
		raise ConfigError(f"n_shapes must be >= 1, got {n_shapes}")
	if cycle_len < 3 or cycle_len < n_shapes:
		raise ConfigError(f"cycle_len must be >= max(3, n_shapes), got {cycle_len}")
	if not 0 <= noise_fraction < 1:
		raise ConfigError(f"noise_fraction must lie in [0, 1), got {noise_fraction}")
	if role_granularity not in {"orbit", "coarse"}:
		raise ConfigError(f"role_granularity must be 'orbit' or 'coarse', got {role_granularity!r}")

	anchors = [(i * cycle_len) // n_shapes for i in range(n_shapes)]
	edges: List[Tuple[int, int]] = [(i, (i + 1) % cycle_len) for i in range(cycle_len)]
	names: List[str] = _cycle_roles(anchors, cycle_len, role_granularity)

	gadget_edges, gadget_names = _shape_gadget(kind)
	offset = cycle_len
	for anchor in anchors:
		edges.append((anchor, offset))
		edges.extend((offset + u, offset + v) for u, v in gadget_edges)
		# gadget roles follow the orbit of their anchor
		suffix = names[anchor][len("cycle-anchor"):]
		names.extend(f"{name}{suffix}" for name in gadget_names)
		offset += len(gadget_names)

	n = offset
	base = Graph.from_edges(n, edges)
	noise_edges = _sample_non_edges(base, int(np.floor(noise_fraction * base.num_edges)), seed)
	graph = Graph.from_edges(n, list(base.edges) + noise_edges)

	role_names = tuple(sorted(set(names)))
	role_ids = {name: i for i, name in enumerate(role_names)}
	roles = {node: role_ids[name] for node, name in enumerate(names)}
	logger.info(
		"Generated %s role graph: n=%d, edges=%d (noise %d), roles=%d",
		kind.value,
		n,
		graph.num_edges,
		len(noise_edges),
		len(role_names),
	)
	return RoleGraph(graph.with_labels(roles), roles, role_names)


def _sample_non_edges(g: Graph, count: int, seed: int) -> List[Tuple[int, int]]:
	if count <= 0:
		return []
	existing = set(g.edges)
	candidates = [(u, v) for u in range(g.n) for v in range(u + 1, g.n) if (u, v) not in existing]
	if count > len(candidates):
		raise ConfigError(f"Cannot add {count} noise edges; only {len(candidates)} non-edges exist")
	rng = np.random.default_rng(seed)
	picked = rng.choice(len(candidates), size=count, replace=False)
	return [candidates[i] for i in sorted(picked)]


def _windmill(blades: int) -> nx.Graph:
	graph = nx.Graph()
	for blade in range(blades):
		graph.add_edges_from([(0, 2 * blade + 1), (0, 2 * blade + 2), (2 * blade + 1, 2 * blade + 2)])
	return graph


def _attach_pendants(graph: nx.Graph, count: int, rng: np.random.Generator) -> nx.Graph:
	graph = graph.copy()
	for _ in range(count):
		nodes = sorted(graph.nodes())
		host = nodes[int(rng.integers(len(nodes)))]
		graph.add_edge(host, max(nodes) + 1)
	return graph


def generate_graph_families(n_per_class: int = 50, seed: int = 42) -> Tuple[List[Graph], List[int]]:
	"""Two families of small connected graphs for graph classification.

	Class 0 are windmills (3-6 triangles sharing a hub), class 1 are stars
	with 6-12 leaves. Every graph gets 1-3 random pendant nodes, which keeps
	stars bipartite and windmills triangle-rich.
	"""

	if n_per_class < 1:
		raise ConfigError(f"n_per_class must be >= 1, got {n_per_class}")
	rng = np.random.default_rng(seed)
	graphs: List[Graph] = []
	labels: List[int] = []
	for _ in range(n_per_class):
		windmill = _attach_pendants(_windmill(int(rng.integers(3, 7))), int(rng.integers(1, 4)), rng)
		graphs.append(Graph.from_networkx(windmill))
		labels.append(0)
		star = _attach_pendants(nx.star_graph(int(rng.integers(6, 13))), int(rng.integers(1, 4)), rng)
		graphs.append(Graph.from_networkx(star))
		labels.append(1)
	logger.info("Generated %d graphs in two families", len(graphs))
	return graphs, labels


__all__: Iterable[str] = ["Shape", "RoleGraph", "generate_role_graph", "generate_graph_families"]
