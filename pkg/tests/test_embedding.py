import numpy as np
import pytest

from proxembed.embedding import (
    EmbeddingKind,
    cfs_embed,
    cfs_landmarks,
    diag_embed,
    multiscale_concat,
    svd_embed,
)
from proxembed.exceptions import ConfigError
from proxembed.nonlinearity import identity
from proxembed.proximity import heat_kernel, rw_power

from conftest import path_graph


def test_svd_identity_rows_orthonormal():
    y = svd_embed(np.eye(3), 3).matrix
    np.testing.assert_allclose(y @ y.T, np.eye(3), atol=1e-12)


def test_svd_diagonal_matrix():
    y = svd_embed(np.diag([4.0, 1.0]), 1).matrix
    np.testing.assert_allclose(y, [[2.0], [0.0]], atol=1e-12)


def test_svd_rank_one_reconstruction():
    v = np.array([1.0, 2.0])
    s = np.outer(v, v)
    y = svd_embed(s, 1).matrix
    np.testing.assert_allclose(y @ y.T, s, atol=1e-8)


def test_svd_psd_full_rank_reconstruction(rng):
    m = rng.normal(size=(7, 7))
    s = m @ m.T
    y = svd_embed(s, 7).matrix
    assert np.linalg.norm(y @ y.T - s) <= 1e-6 * np.linalg.norm(s)


def test_svd_sign_convention(rng):
    m = rng.normal(size=(6, 6))
    y = svd_embed(m @ m.T, 4).matrix
    pivots = np.argmax(np.abs(y), axis=0)
    assert np.all(y[pivots, np.arange(4)] > 0)


def test_svd_rejects_too_many_dimensions():
    with pytest.raises(ConfigError):
        svd_embed(np.eye(3), 4)


def test_cfs_zero_matrix():
    y = cfs_embed(np.zeros((4, 4)), 6)
    assert y.kind is EmbeddingKind.STRUCTURAL
    np.testing.assert_allclose(y.matrix, np.tile([1.0, 0.0], (4, 3)))


def test_cfs_identity_two_nodes():
    d = 8
    y = cfs_embed(np.eye(2), d).matrix
    t = cfs_landmarks(d)
    expected = np.column_stack([(np.cos(t) + 1) / 2, np.sin(t) / 2]).reshape(-1)
    np.testing.assert_allclose(y[0], expected, atol=1e-12)
    np.testing.assert_allclose(y[1], expected, atol=1e-12)


def test_cfs_rows_ignore_column_order(rng):
    s = rng.uniform(size=(5, 5))
    perm = rng.permutation(5)
    p = np.eye(5)[perm].T
    y = cfs_embed(s, 10).matrix
    permuted = cfs_embed(p @ s @ p.T, 10).matrix
    np.testing.assert_allclose(permuted[perm], y, atol=1e-12)


def test_cfs_normalized_magnitude(rng):
    y = cfs_embed(rng.normal(size=(9, 9)), 20).matrix
    assert np.all(np.abs(y) <= 1.0 + 1e-12)
    unnormalized = cfs_embed(rng.normal(size=(9, 9)), 20, normalize=False).matrix
    assert np.all(np.abs(unnormalized) <= 9.0 + 1e-12)


def test_cfs_landmarks():
    np.testing.assert_allclose(cfs_landmarks(10), [20, 40, 60, 80, 100])
    np.testing.assert_allclose(cfs_landmarks(6, landmark_max=30, include_zero=True), [0, 15, 30])
    with pytest.raises(ConfigError):
        cfs_landmarks(7)


def test_diag_embed_examples(triangle):
    np.testing.assert_array_equal(diag_embed(np.eye(4)).matrix, np.ones((4, 1)))
    y = diag_embed(heat_kernel(triangle, 1.0)).matrix
    np.testing.assert_allclose(y, np.full((3, 1), (1 + 2 * np.exp(-3)) / 3), atol=1e-12)
    y = diag_embed(rw_power(path_graph(3), 2)).matrix
    np.testing.assert_allclose(y.ravel(), [0.5, 1.0, 0.5], atol=1e-12)


def test_multiscale_concat(triangle):
    blocks = [diag_embed(heat_kernel(triangle, s), scale=s) for s in (0.0, 1.0)]
    assert multiscale_concat(blocks[:1]) is blocks[0]
    combined = multiscale_concat(blocks)
    np.testing.assert_allclose(combined.matrix[:, 0], 1.0, atol=1e-12)
    np.testing.assert_allclose(combined.matrix[:, 1], (1 + 2 * np.exp(-3)) / 3, atol=1e-12)
    assert [block.scale for block in combined.provenance] == [0.0, 1.0]


def test_multiscale_concat_width_and_associativity(rng):
    blocks = [cfs_embed(rng.uniform(size=(5, 5)), 4) for _ in range(3)]
    combined = multiscale_concat(blocks)
    assert combined.dimension == 12
    nested = multiscale_concat([multiscale_concat(blocks[:2]), blocks[2]])
    np.testing.assert_array_equal(nested.matrix, combined.matrix)


def test_multiscale_concat_rejects_mismatch(rng):
    structural = cfs_embed(rng.uniform(size=(4, 4)), 4)
    with pytest.raises(ConfigError):
        multiscale_concat([structural, diag_embed(np.eye(4))])
    with pytest.raises(ConfigError):
        multiscale_concat([structural, cfs_embed(np.eye(3), 4)])


def test_provenance_records_operator_and_filter(triangle):
    y = cfs_embed(identity(heat_kernel(triangle, 0.5)), 4)
    (block,) = y.provenance
    assert block.operator == "HK"
    assert block.filter == "identity"
    assert block.params == (("s", 0.5),)
