import numpy as np
import pytest
from sklearn.cluster import AgglomerativeClustering
from sklearn.metrics import completeness_score, homogeneity_score

from proxembed.config import build
from proxembed.evaluator import (
    EvalReport,
    classify_graphs,
    classify_nodes,
    cluster_nodes,
    row_stats,
    row_stats_histogram,
)
from proxembed.exceptions import EvaluationError
from proxembed.graph_features import embed_graph_set, netlsd_features, retgk_features
from proxembed.synth import generate_graph_families


def _blobs(rng, per_class=50, dim=4, spread=5.0):
    centers = np.array([spread, -spread])
    labels = np.repeat([0, 1], per_class)
    features = centers[labels][:, None] + rng.normal(size=(2 * per_class, dim))
    return features, labels


def test_classify_nodes_separable_blobs(rng):
    features, labels = _blobs(rng)
    report = classify_nodes(features, labels, seed=0)
    assert report.task == "node_classification"
    assert report.metrics["micro_f1"] >= 0.95
    assert report.details == {"n_train": 80, "n_test": 20}


def test_classify_nodes_shuffled_labels_sit_at_chance():
    scores = []
    for seed in range(20):
        rng = np.random.default_rng(seed)
        features = rng.normal(size=(200, 4))
        labels = rng.permutation(np.repeat([0, 1], 100))
        scores.append(classify_nodes(features, labels, seed=seed).metrics["micro_f1"])
    assert abs(np.mean(scores) - 0.5) <= 0.1


@pytest.mark.parametrize("separable", [True, False])
def test_classify_nodes_duplicated_rows_keep_micro_f1(rng, separable):
    features, labels = _blobs(rng)
    if not separable:
        features = np.ones_like(features)
    single = classify_nodes(features, labels, seed=7)
    doubled = classify_nodes(np.vstack([features, features]), np.concatenate([labels, labels]), seed=7)
    assert doubled.metrics["micro_f1"] == pytest.approx(single.metrics["micro_f1"])


def test_classify_nodes_identical_rows_score_majority_rate():
    labels = np.repeat([0, 1], 50)
    report = classify_nodes(np.ones((100, 3)), labels, seed=5)
    assert report.metrics["micro_f1"] == pytest.approx(0.5)


def test_classify_nodes_is_deterministic(rng):
    features, labels = _blobs(rng, spread=0.5)
    first = classify_nodes(features, labels, seed=11)
    second = classify_nodes(features, labels, seed=11)
    assert first.metrics == second.metrics


def test_classify_nodes_label_errors():
    with pytest.raises(EvaluationError):
        classify_nodes(np.zeros((10, 2)), np.zeros(10))
    with pytest.raises(EvaluationError):
        classify_nodes(np.zeros((10, 2)), [0, 1] * 4)


def test_cluster_nodes_recovers_separated_groups(rng):
    features = np.vstack([rng.normal(loc=center, scale=0.1, size=(10, 2)) for center in (0.0, 10.0, 20.0)])
    roles = np.repeat([0, 1, 2], 10)
    report = cluster_nodes(features, 3, roles)
    assert report.metrics["homogeneity"] == pytest.approx(1.0)
    assert report.metrics["completeness"] == pytest.approx(1.0)
    assert report.metrics["silhouette"] > 0.9


def test_cluster_nodes_finer_clusters_than_roles(rng):
    features = np.vstack([rng.normal(loc=center, scale=0.1, size=(10, 2)) for center in (0.0, 10.0, 20.0)])
    roles = np.repeat([0, 0, 1], 10)
    report = cluster_nodes(features, 3, roles)
    assert report.metrics["homogeneity"] == pytest.approx(1.0)
    assert report.metrics["completeness"] < 1.0


def test_cluster_nodes_degenerate_cuts(rng):
    features = rng.normal(size=(6, 2))
    roles = [0, 0, 0, 1, 1, 1]
    single = cluster_nodes(features, 1, roles)
    assert single.metrics["homogeneity"] == pytest.approx(0.0)
    assert single.metrics["completeness"] == pytest.approx(1.0)
    assert single.metrics["silhouette"] == 0.0
    every_node = cluster_nodes(features, 6, roles)
    assert every_node.metrics["homogeneity"] == pytest.approx(1.0)
    assert every_node.metrics["silhouette"] == 0.0


def test_cluster_nodes_rejects_bad_k(rng):
    with pytest.raises(EvaluationError):
        cluster_nodes(rng.normal(size=(4, 2)), 5, [0, 1, 0, 1])


def test_homogeneity_and_completeness_are_dual(rng):
    for _ in range(20):
        truth = rng.integers(0, 4, size=30)
        predicted = rng.integers(0, 3, size=30)
        assert homogeneity_score(truth, predicted) == pytest.approx(completeness_score(predicted, truth), abs=1e-12)
    features = np.vstack([rng.normal(loc=center, scale=0.1, size=(10, 2)) for center in (0.0, 10.0, 20.0)])
    roles = np.repeat([0, 0, 1], 10)
    report = cluster_nodes(features, 3, roles)
    predicted = AgglomerativeClustering(n_clusters=3, linkage="single").fit_predict(features)
    assert report.metrics["homogeneity"] == pytest.approx(completeness_score(predicted, roles), abs=1e-12)
    assert report.metrics["completeness"] == pytest.approx(homogeneity_score(predicted, roles), abs=1e-12)


def test_classify_graphs_separates_families():
    graphs, labels = generate_graph_families(n_per_class=15, seed=0)
    features = np.vstack([netlsd_features(g).values for g in graphs])
    report = classify_graphs(features, labels, folds=5, trials=2, seed=3)
    assert report.metrics["accuracy_mean"] >= 0.9
    assert report.metrics["accuracy_max"] >= report.metrics["accuracy_mean"]
    assert len(report.details["per_trial"]) == 2
    again = classify_graphs(features, labels, folds=5, trials=2, seed=3)
    assert again.metrics == report.metrics


def test_classify_graphs_shuffled_labels_sit_at_chance():
    graphs, _ = generate_graph_families(n_per_class=20, seed=4)
    features = np.vstack([netlsd_features(g).values for g in graphs])
    scores = []
    for seed in range(10):
        labels = np.random.default_rng(seed).permutation(np.repeat([0, 1], 20))
        scores.append(classify_graphs(features, labels, folds=5, trials=1, seed=seed).metrics["accuracy_mean"])
    assert abs(np.mean(scores) - 0.5) <= 0.1


def test_random_walk_structural_features_separate_families():
    graphs, labels = generate_graph_families(n_per_class=25, seed=0)
    cfg = build({
        "proximity": {"name": "rw_pow"},
        "nonlinearity": {"name": "identity"},
        "embedding": {"name": "cfs", "dimension": 10},
        "scales": (1.0, 2.0, 3.0, 4.0, 5.0),
    })
    features = embed_graph_set(graphs, cfg, n_jobs=1)
    report = classify_graphs(features, labels, folds=5, trials=2, seed=3)
    assert report.metrics["accuracy_mean"] >= 0.9


def test_classify_graphs_needs_enough_graphs_per_class(rng):
    with pytest.raises(EvaluationError):
        classify_graphs(rng.normal(size=(8, 3)), [0, 1] * 4, folds=5)


def test_row_stats_examples():
    stats = row_stats(np.eye(3))
    np.testing.assert_allclose(stats.sums, 1.0)
    np.testing.assert_allclose(stats.variances, 2 / 9)
    np.testing.assert_allclose(stats.entropies, 0.0, atol=1e-12)

    stats = row_stats(np.array([[1.0, 1.0, 1.0, 1.0], [0.0, 0.0, 0.0, 0.0], [-1.0, 1.0, 0.0, 0.0]]))
    assert stats.entropies[0] == pytest.approx(np.log(4))
    assert stats.zero_rows.tolist() == [False, True, False]
    assert stats.entropies[1] == 0.0
    assert stats.entropies[2] == pytest.approx(0.0, abs=1e-12)
    assert stats.sums[2] == 0.0


def test_row_stats_histogram_counts(rng):
    stats = row_stats(rng.uniform(size=(30, 30)))
    table = row_stats_histogram(stats, bins=5)
    assert len(table) == 15
    assert table.groupby("statistic")["count"].sum().to_dict() == {"entropy": 30, "sum": 30, "variance": 30}
    assert list(stats.to_frame().columns) == ["row", "sum", "variance", "entropy", "zero_row"]


def test_eval_report_checks_ranges():
    with pytest.raises(EvaluationError):
        EvalReport(task="node_classification", metrics={"micro_f1": 1.5})
    report = EvalReport(task="node_clustering", metrics={"silhouette": -0.2})
    assert report.to_dict()["metrics"] == {"silhouette": -0.2}


@pytest.mark.slow
def test_return_probabilities_separate_families_full_protocol():
    # odd-length returns vanish on the bipartite stars
    graphs, labels = generate_graph_families(n_per_class=50, seed=42)
    features = np.vstack([retgk_features(g, 5).values for g in graphs])
    assert np.all(features[np.array(labels) == 1][:, [0, 2, 4]] == 0)
    report = classify_graphs(features, labels, folds=10, trials=5, seed=42)
    assert report.metrics["accuracy_mean"] >= 0.95
