"""Shared fixtures for the proxembed test suite."""

from __future__ import annotations

from typing import Tuple

import networkx as nx
import numpy as np
import pytest

from proxembed.graph_core import Graph


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def random_connected_graph(rng: np.random.Generator, n: int, p: float = 0.5) -> Graph:
    """Connected G(n, p) sample; retries until connected."""
    while True:
        graph = nx.gnp_random_graph(n, p, seed=int(rng.integers(1 << 31)))
        if nx.is_connected(graph):
            return Graph.from_networkx(graph)


def automorphic_union(rng: np.random.Generator, n: int, p: float = 0.5) -> Tuple[Graph, np.ndarray]:
    """blockdiag(G1, P G1 P^T) and the map i -> twin of i (in the second block)."""
    first = random_connected_graph(rng, n, p)
    permutation = rng.permutation(n)
    union = first.disjoint_union(first.permute(permutation))
    return union, permutation + n


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(7)


@pytest.fixture
def single_edge() -> Graph:
    return Graph.from_edges(2, [(0, 1)])


@pytest.fixture
def triangle() -> Graph:
    return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def path3() -> Graph:
    return path_graph(3)


@pytest.fixture
def star3() -> Graph:
    return Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])


@pytest.fixture
def karate() -> Graph:
    graph = nx.karate_club_graph()
    clubs = {node: int(data["club"] == "Officer") for node, data in graph.nodes(data=True)}
    unweighted = nx.Graph()
    unweighted.add_nodes_from(sorted(graph.nodes()))
    unweighted.add_edges_from(graph.edges())
    return Graph.from_networkx(unweighted, labels=clubs)
