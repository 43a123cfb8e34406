import networkx as nx
import numpy as np
import pytest
from joblib import parallel_backend

from proxembed.config import build, load_config
from proxembed.exceptions import ConfigError
from proxembed.graph_core import Graph
from proxembed.graph_features import (
    DEFAULT_HEAT_SCALES,
    aggregate_mean,
    embed_graph_set,
    feature_matrix,
    find_expressivity_witness,
    netlsd_features,
    netlsd_scales,
    retgk_features,
    two_regular_graphs,
)
from proxembed.pipeline import run_pipeline

from conftest import cycle_graph, path_graph, random_connected_graph


def _cycle_sizes(graph: Graph):
    return sorted(len(c) for c in nx.connected_components(graph.to_networkx()))


def test_heat_traces_match_pipeline_reduction(rng):
    cfg = load_config(preset="netlsd")
    for _ in range(50):
        graph = random_connected_graph(rng, int(rng.integers(4, 16)), 0.4)
        pooled = aggregate_mean(run_pipeline(graph, cfg), cfg).values
        np.testing.assert_allclose(pooled, netlsd_features(graph, cfg.scales).values, atol=1e-10)


def test_return_probabilities_match_pipeline_reduction(rng):
    cfg = load_config(preset="retgk")
    for _ in range(50):
        graph = random_connected_graph(rng, int(rng.integers(4, 16)), 0.4)
        pooled = aggregate_mean(run_pipeline(graph, cfg), cfg).values
        np.testing.assert_allclose(pooled, retgk_features(graph, 5).values, atol=1e-10)


def test_heat_trace_examples(triangle):
    scales = (0.1, 1.0, 2.0)
    expected = [(1 + 2 * np.exp(-3 * s)) / 3 for s in scales]
    np.testing.assert_allclose(netlsd_features(triangle, scales).values, expected, atol=1e-12)
    np.testing.assert_allclose(netlsd_features(Graph(4)).values, np.ones(5))


def test_return_probability_examples(triangle, path3):
    np.testing.assert_allclose(retgk_features(triangle, 3).values, [0.0, 0.5, 0.25], atol=1e-12)
    np.testing.assert_allclose(retgk_features(path3, 4).values, [0.0, 2 / 3, 0.0, 2 / 3], atol=1e-12)


def test_netlsd_scales_default_grid():
    np.testing.assert_allclose(netlsd_scales(), DEFAULT_HEAT_SCALES, rtol=1e-12)
    assert len(netlsd_scales(250)) == 250
    with pytest.raises(ConfigError):
        netlsd_scales(0)


def test_invalid_feature_arguments(triangle):
    with pytest.raises(ConfigError):
        retgk_features(triangle, 0)
    with pytest.raises(ConfigError):
        netlsd_features(triangle, ())


def test_embed_graph_set_rejects_svd(triangle):
    with pytest.raises(ConfigError):
        embed_graph_set([triangle], load_config(preset="hope"))


def test_embed_graph_set_keeps_order_and_width(rng):
    graphs = [random_connected_graph(rng, n) for n in (5, 9, 7, 12)]
    cfg = build({"proximity": {"name": "hk", "s": 1.0}, "embedding": {"name": "cfs", "dimension": 6}})
    features = embed_graph_set(graphs, cfg, n_jobs=1)
    assert [f.n for f in features] == [5, 9, 7, 12]
    assert feature_matrix(features).shape == (4, 6)
    with parallel_backend("threading"):
        parallel = embed_graph_set(graphs, cfg, n_jobs=2)
    np.testing.assert_array_equal(feature_matrix(parallel), feature_matrix(features))


def test_pooled_features_are_permutation_invariant(rng):
    graph = random_connected_graph(rng, 10)
    permuted = graph.permute(rng.permutation(10))
    cfg = load_config(preset="graphwave")
    left, right = embed_graph_set([graph, permuted], cfg, n_jobs=1)
    np.testing.assert_allclose(left.values, right.values, atol=1e-9)


def test_two_regular_graphs_enumeration():
    graphs = two_regular_graphs(12)
    assert len(graphs) == 9
    assert all(np.all(g.degrees() == 2) for g in graphs)
    assert sorted(_cycle_sizes(g) for g in two_regular_graphs(6)) == [[3, 3], [6]]


def test_witness_pair_has_equal_return_probabilities():
    twin_hexagons = cycle_graph(6).disjoint_union(cycle_graph(6))
    dodecagon = cycle_graph(12)
    np.testing.assert_allclose(retgk_features(twin_hexagons, 5).values, retgk_features(dodecagon, 5).values, atol=1e-12)
    cfg = load_config(preset="retgk", overrides={"embedding.name": "cfs", "embedding.dimension": 10})
    left, right = embed_graph_set([twin_hexagons, dodecagon], cfg, n_jobs=1)
    assert np.max(np.abs(left.values - right.values)) > 1e-3


def test_witness_search_on_two_regular_graphs():
    found = find_expressivity_witness(two_regular_graphs(12), max_k=5)
    assert found is not None
    first, second, gap = found
    assert {tuple(_cycle_sizes(first)), tuple(_cycle_sizes(second))} == {(6, 6), (12,)}
    assert gap > 1e-3


def test_witness_search_skips_isomorphic_and_distinguishable_pairs(rng, triangle):
    hexagon = cycle_graph(6)
    relabelled = hexagon.permute(rng.permutation(6))
    assert find_expressivity_witness([hexagon, relabelled]) is None
    assert find_expressivity_witness([triangle, path_graph(3)]) is None
