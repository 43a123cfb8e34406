import numpy as np
import pytest

from proxembed.exceptions import ConfigError, NoPositiveEntryError
from proxembed.nonlinearity import (
    FilterKind,
    apply_filter,
    binarize_percentile,
    identity,
    log_general,
    log_ppmi,
    parse_filter,
)
from proxembed.proximity import heat_kernel, ppmi

from conftest import random_connected_graph


def test_identity_passes_input_through(rng):
    s = rng.normal(size=(4, 4))
    out = identity(s).matrix
    assert out is s or np.array_equal(out, s)
    np.testing.assert_array_equal(identity(np.zeros((3, 3))).matrix, np.zeros((3, 3)))
    np.testing.assert_array_equal(identity(identity(s).matrix).matrix, s)


def test_log_ppmi_examples():
    s = np.array([[0.5, 1.0], [np.e, np.e ** 2]])
    np.testing.assert_allclose(log_ppmi(s).matrix, [[0, 0], [1, 2]], atol=1e-12)
    np.testing.assert_array_equal(log_ppmi(np.full((3, 3), 0.9)).matrix, np.zeros((3, 3)))


def test_log_ppmi_monotone(rng):
    s = rng.uniform(0, 5, size=(5, 5))
    bigger = s + rng.uniform(0, 1, size=(5, 5))
    assert np.all(log_ppmi(s).matrix <= log_ppmi(bigger).matrix)


def test_log_general_examples():
    s = np.array([[-1.0, 0.01], [0.1, 1.0]])
    np.testing.assert_allclose(log_general(s).matrix, [[0, 0], [np.log(10), np.log(100)]], atol=1e-12)
    np.testing.assert_array_equal(log_general(np.full((2, 2), 3.0)).matrix, np.zeros((2, 2)))


def test_log_general_scale_invariant(rng):
    s = rng.normal(size=(6, 6))
    # power-of-two factors scale exactly, so the ratios are bit-identical
    for c in (2.0, 0.25, 1024.0):
        np.testing.assert_array_equal(log_general(c * s).matrix, log_general(s).matrix)
    np.testing.assert_allclose(log_general(3.7 * s).matrix, log_general(s).matrix, atol=1e-12)


def test_log_general_needs_positive_entry():
    with pytest.raises(NoPositiveEntryError):
        log_general(-np.ones((2, 2)))


def test_binarize_hundred_distinct_entries():
    s = np.arange(1, 101, dtype=float).reshape(10, 10)
    out = binarize_percentile(s, 50).matrix
    assert out.sum() == 50
    assert np.all(out[s > 50] == 1)


def test_binarize_zero_percentile_drops_only_minimum(rng):
    s = rng.permutation(np.arange(1, 17, dtype=float)).reshape(4, 4)
    out = binarize_percentile(s, 0).matrix
    assert out[s == 1].tolist() == [0.0]
    assert out.sum() == 15


def test_binarize_constant_matrix_is_zero():
    for p in (0, 30, 99):
        np.testing.assert_array_equal(binarize_percentile(np.full((3, 3), 2.0), p).matrix, np.zeros((3, 3)))


def test_binarize_sparsity_bound(rng):
    s = np.round(rng.uniform(0, 3, size=(12, 12)), 1)
    for p in (5, 25, 50, 95):
        out = binarize_percentile(s, p).matrix
        assert set(np.unique(out)) <= {0.0, 1.0}
        zeros = (out == 0).mean()
        rank = max(1, int(np.ceil(p * s.size / 100)))
        threshold = np.sort(s.ravel())[rank - 1]
        tie_mass = (s == threshold).mean()
        assert p / 100 <= zeros <= p / 100 + tie_mass + 1 / s.size


def test_binarize_rejects_bad_percentile():
    with pytest.raises(ConfigError):
        binarize_percentile(np.eye(2), 100)


def test_filters_permutation_equivariant_and_symmetric(rng):
    graph = random_connected_graph(rng, 9)
    s = heat_kernel(graph, 0.5).matrix
    perm = rng.permutation(9)
    p = np.eye(9)[perm].T
    permuted = p @ s @ p.T
    for name, percentile in (("identity", None), ("log", None), ("bin", 5.0), ("bin", 50.0), ("bin", 95.0)):
        out = apply_filter(s, name, percentile).matrix
        np.testing.assert_array_equal(apply_filter(permuted, name, percentile).matrix, p @ out @ p.T)
        np.testing.assert_array_equal(out, out.T)


def test_apply_filter_log_resolves_by_source(rng):
    graph = random_connected_graph(rng, 8)
    assert apply_filter(ppmi(graph, T=3), "log").kind is FilterKind.LOG_PPMI
    assert apply_filter(heat_kernel(graph, 1.0), "log").kind is FilterKind.LOG_GENERAL


def test_parse_filter():
    assert parse_filter("identity") == ("identity", None)
    assert parse_filter("LOG") == ("log", None)
    assert parse_filter("bin:95") == ("bin", 95.0)
    with pytest.raises(ConfigError):
        parse_filter("relu")
    with pytest.raises(ConfigError):
        parse_filter("bin:abc")
