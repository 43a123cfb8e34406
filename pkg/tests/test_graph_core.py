import numpy as np
import pytest

from proxembed.exceptions import AsymmetricMatrixError, EdgeListParseError, GraphDataError, IsolatedNodeError
from proxembed.graph_core import (
    Graph,
    adjacency,
    degree_matrix,
    laplacian,
    laplacian_pinv,
    load_edge_list,
    load_labels,
    rw_transition,
    spectral_radius,
    symmetric_eig,
)

from conftest import path_graph, random_connected_graph


def test_load_edge_list_two_edge_path(tmp_path):
    path = tmp_path / "g.edges"
    path.write_text("0 1\n1 2\n")
    graph = load_edge_list(path)
    assert graph.n == 3
    assert graph.edges == ((0, 1), (1, 2))


def test_load_edge_list_collapses_reversed_duplicates(tmp_path):
    path = tmp_path / "g.edges"
    path.write_text("0 1\n1 0\n")
    graph = load_edge_list(path)
    assert graph.edges == ((0, 1),)


def test_load_edge_list_reindexes_string_ids(tmp_path):
    path = tmp_path / "g.edges"
    path.write_text("# comment\na b\n\nb c\n")
    graph = load_edge_list(path)
    assert graph.id_map == {"a": 0, "b": 1, "c": 2}
    assert graph.edges == ((0, 1), (1, 2))
    assert graph.index_of("c") == 2


def test_load_edge_list_sorts_integer_ids(tmp_path):
    path = tmp_path / "g.edges"
    path.write_text("10 3\n3 7\n")
    graph = load_edge_list(path)
    assert graph.node_ids == (3, 7, 10)
    assert graph.edges == ((0, 1), (0, 2))


def test_load_edge_list_drops_self_loops(tmp_path, caplog):
    path = tmp_path / "g.edges"
    path.write_text("0 0\n0 1\n")
    graph = load_edge_list(path)
    assert graph.edges == ((0, 1),)
    assert "self-loop" in caplog.text


def test_load_edge_list_reports_line_number(tmp_path):
    path = tmp_path / "g.edges"
    path.write_text("0 1\n# fine\n1 2 3\n")
    with pytest.raises(EdgeListParseError) as excinfo:
        load_edge_list(path)
    assert excinfo.value.line_number == 3


def test_load_edge_list_weighted(tmp_path):
    path = tmp_path / "g.edges"
    path.write_text("0 2.5 1\n1 0.5 2\n")
    graph = load_edge_list(path, weighted=True)
    assert graph.node_ids == (0, 1, 2)
    a = adjacency(graph)
    assert a[0, 1] == a[1, 0] == 2.5
    assert a[1, 2] == 0.5
    assert a[0, 2] == 0.0


def test_load_edge_list_weight_last(tmp_path):
    path = tmp_path / "g.edges"
    path.write_text("0 1 2.5\n1 2 0.5\n")
    graph = load_edge_list(path, weighted=True, weight_last=True)
    a = adjacency(graph)
    assert a[0, 1] == 2.5
    assert a[1, 2] == 0.5


def test_load_edge_list_rejects_non_positive_weight(tmp_path):
    path = tmp_path / "g.edges"
    path.write_text("0 -1 1\n")
    with pytest.raises(EdgeListParseError):
        load_edge_list(path, weighted=True)
    path.write_text("0 x 1\n")
    with pytest.raises(EdgeListParseError):
        load_edge_list(path, weighted=True)


def test_load_edge_list_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_edge_list(tmp_path / "missing.edges")


def test_load_labels_maps_original_ids(tmp_path):
    edges = tmp_path / "g.edges"
    edges.write_text("a b\nb c\n")
    labels = tmp_path / "g.labels"
    labels.write_text("c 1\na 0\nb 1\n")
    graph = load_labels(labels, load_edge_list(edges))
    assert graph.label_array().tolist() == [0, 1, 1]


def test_load_labels_unknown_node(tmp_path):
    edges = tmp_path / "g.edges"
    edges.write_text("0 1\n")
    labels = tmp_path / "g.labels"
    labels.write_text("5 1\n")
    with pytest.raises(EdgeListParseError):
        load_labels(labels, load_edge_list(edges))


def test_graph_rejects_self_loop_and_bad_index():
    with pytest.raises(GraphDataError):
        Graph.from_edges(2, [(1, 1)])
    with pytest.raises(GraphDataError):
        Graph.from_edges(2, [(0, 2)])


def test_adjacency_examples(path3, triangle):
    np.testing.assert_array_equal(adjacency(path3), [[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    np.testing.assert_array_equal(adjacency(Graph(2)), np.zeros((2, 2)))
    np.testing.assert_array_equal(adjacency(triangle), np.ones((3, 3)) - np.eye(3))


def test_degree_matrix_examples(path3, triangle, star3):
    np.testing.assert_array_equal(degree_matrix(path3), np.diag([1, 2, 1]))
    np.testing.assert_array_equal(degree_matrix(triangle), np.diag([2, 2, 2]))
    np.testing.assert_array_equal(degree_matrix(star3), np.diag([3, 1, 1, 1]))


def test_laplacian_examples(path3, triangle, rng):
    np.testing.assert_array_equal(laplacian(path3), [[1, -1, 0], [-1, 2, -1], [0, -1, 1]])
    eigenvalues, _ = symmetric_eig(laplacian(triangle))
    np.testing.assert_allclose(eigenvalues, [0, 3, 3], atol=1e-12)
    graph = random_connected_graph(rng, 10)
    np.testing.assert_allclose(laplacian(graph) @ np.ones(10), 0, atol=1e-12)


def test_rw_transition_examples(path3, triangle):
    np.testing.assert_allclose(rw_transition(path3), [[0, 1, 0], [0.5, 0, 0.5], [0, 1, 0]])
    np.testing.assert_allclose(rw_transition(triangle), 0.5 * (np.ones((3, 3)) - np.eye(3)))


def test_rw_transition_names_isolated_node(tmp_path):
    graph = Graph.from_edges(3, [(0, 1)], node_ids=["x", "y", "z"])
    with pytest.raises(IsolatedNodeError) as excinfo:
        rw_transition(graph)
    assert excinfo.value.node == "z"


def test_symmetric_eig_examples(path3):
    values, vectors = symmetric_eig(np.eye(3))
    np.testing.assert_allclose(values, [1, 1, 1])
    values, vectors = symmetric_eig(np.diag([2.0, 5.0]))
    np.testing.assert_allclose(values, [2, 5])
    np.testing.assert_allclose(np.abs(vectors), np.eye(2), atol=1e-12)
    values, _ = symmetric_eig(laplacian(path3))
    np.testing.assert_allclose(values, [0, 1, 3], atol=1e-12)


def test_symmetric_eig_reconstruction(rng):
    m = rng.normal(size=(6, 6))
    m = m + m.T
    values, vectors = symmetric_eig(m)
    assert np.linalg.norm(vectors @ np.diag(values) @ vectors.T - m) <= 1e-6 * np.linalg.norm(m)
    np.testing.assert_allclose(vectors.T @ vectors, np.eye(6), atol=1e-8)


def test_symmetric_eig_rejects_asymmetric():
    with pytest.raises(AsymmetricMatrixError):
        symmetric_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_laplacian_pinv_examples(path3, triangle):
    np.testing.assert_array_equal(laplacian_pinv(Graph(4)), np.zeros((4, 4)))
    lap = laplacian(path3)
    np.testing.assert_allclose(lap @ laplacian_pinv(path3) @ lap, lap, atol=1e-10)
    expected = (3 * np.eye(3) - np.ones((3, 3))) / 9
    np.testing.assert_allclose(laplacian_pinv(triangle), expected, atol=1e-12)


def test_laplacian_pinv_disconnected(triangle):
    union = triangle.disjoint_union(path_graph(3))
    lap = laplacian(union)
    pinv = laplacian_pinv(union)
    assert np.linalg.norm(lap @ pinv @ lap - lap) <= 1e-6
    np.testing.assert_allclose(pinv[:3, 3:], 0, atol=1e-12)


def test_derived_matrices_permutation_equivariant(rng):
    for _ in range(20):
        graph = random_connected_graph(rng, 10, 0.4)
        perm = rng.permutation(10)
        p = np.zeros((10, 10))
        p[perm, np.arange(10)] = 1.0
        permuted = graph.permute(perm)
        for matrix_fn in (adjacency, degree_matrix, laplacian, rw_transition, laplacian_pinv):
            np.testing.assert_allclose(matrix_fn(permuted), p @ matrix_fn(graph) @ p.T, atol=1e-9)


def test_spectral_radius_bipartite_and_regular(triangle, path3):
    assert spectral_radius(adjacency(triangle)) == pytest.approx(2.0, rel=1e-9)
    assert spectral_radius(adjacency(path3)) == pytest.approx(np.sqrt(2.0), rel=1e-6)
