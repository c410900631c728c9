"""Jacobi eigensolver and singular values."""

from __future__ import annotations

import logging
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from pairlab.errors import DomainError
from pairlab.linalg import SymMatrix, _off_norm, clamp_occupations, svd_coef_matrix, sym_eigs


def _random_symmetric(d: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(d, d))
    return a + a.T


@pytest.mark.parametrize("d", [2, 7, 16, 33])
def test_sym_eigs_matches_lapack(d):
    a = _random_symmetric(d, seed=d)
    values, vectors = sym_eigs(a)
    assert_allclose(values, np.sort(np.linalg.eigvalsh(a))[::-1], atol=1e-10 * np.linalg.norm(a))
    assert_allclose(vectors.T @ vectors, np.eye(d), atol=1e-12)
    assert_allclose(a @ vectors, vectors * values, atol=1e-9 * np.linalg.norm(a))


@pytest.mark.parametrize("d", [3, 6, 20, 60])
@pytest.mark.parametrize("seed", range(5))
def test_sym_eigs_converges_on_random_matrices(d, seed):
    a = _random_symmetric(d, seed=1000 * d + seed)
    values, vectors = sym_eigs(a)
    norm = np.linalg.norm(a)
    assert_allclose(values, np.sort(np.linalg.eigvalsh(a))[::-1], atol=1e-10 * norm)
    assert_allclose(a @ vectors, vectors * values, atol=1e-9 * norm)


def test_off_diagonal_norm_resolves_tiny_couplings():
    a = np.diag([3.0, 2.0, 1.0])
    a[0, 1] = a[1, 0] = 1e-14
    assert _off_norm(a) == pytest.approx(math.sqrt(2.0) * 1e-14, rel=1e-12)
    values, _ = sym_eigs(a)
    assert_allclose(values, [3.0, 2.0, 1.0], atol=1e-13)


def test_sym_eigs_sorted_descending():
    values, _ = sym_eigs(np.diag([0.1, 3.0, -2.0, 1.0]))
    assert list(values) == [3.0, 1.0, 0.1, -2.0]


def test_sym_eigs_degenerate_spectrum():
    q, _ = np.linalg.qr(np.random.default_rng(3).normal(size=(6, 6)))
    a = q @ np.diag([0.5, 0.5, 0.2, 0.2, 0.1, 0.0]) @ q.T
    values, _ = sym_eigs(a)
    assert_allclose(values, [0.5, 0.5, 0.2, 0.2, 0.1, 0.0], atol=1e-12)


def test_sym_eigs_one_by_one():
    values, vectors = sym_eigs(np.array([[2.5]]))
    assert values[0] == 2.5
    assert vectors[0, 0] == 1.0


def test_sym_matrix_validation():
    with pytest.raises(DomainError):
        SymMatrix.from_array(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(DomainError):
        SymMatrix.from_array(np.ones((2, 3)))
    with pytest.raises(DomainError):
        SymMatrix.from_array(np.array([[np.nan]]))
    assert SymMatrix.from_array(np.eye(3)).dim == 3


def test_svd_coef_matrix_rectangular():
    c = np.random.default_rng(7).normal(size=(5, 8))
    sigma = svd_coef_matrix(c)
    expected = np.linalg.svd(c, compute_uv=False)
    assert sigma.shape == (8,)
    assert_allclose(sigma[:5], expected, atol=1e-10)
    assert_allclose(sigma[5:], 0.0, atol=1e-6)


def test_svd_coef_matrix_vectors():
    c = np.diag([3.0, 1.0, 2.0])
    sigma, vectors = svd_coef_matrix(c, return_vectors=True)
    assert_allclose(sigma, [3.0, 2.0, 1.0], atol=1e-12)
    assert_allclose(np.abs(vectors[:, 0]), [1.0, 0.0, 0.0], atol=1e-12)


def test_clamp_occupations_logs_large_clamps(caplog):
    with caplog.at_level(logging.WARNING, logger="pairlab.linalg"):
        clipped = clamp_occupations(np.array([1.0 + 1e-3, 0.5, -1e-12]))
    assert_allclose(clipped, [1.0, 0.5, 0.0])
    assert any("Clamped" in record.message for record in caplog.records)


def test_clamp_occupations_silent_for_valid_values(caplog):
    with caplog.at_level(logging.WARNING, logger="pairlab.linalg"):
        clamp_occupations(np.array([0.7, 0.3]))
    assert not caplog.records
