"""Tests for utils/matops.py."""

from __future__ import annotations

import numpy as np
import pytest
import scipy.sparse

from utils import matops
from utils.errors import DomainError, NumericError, ShapeError, SingularMatrixError, SizeError
from utils.matops import DEFAULT_SEED, Inertia

ALPHA = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA3 = np.diag([1.0, -1.0]).astype(complex)


@pytest.fixture
def rng():
    return np.random.default_rng(DEFAULT_SEED)


# ── construction ─────────────────────────────────────────────────────────────

def test_kron_examples():
    np.testing.assert_allclose(matops.kron(np.eye(2), np.eye(3)), np.eye(6))
    np.testing.assert_allclose(matops.kron(np.diag([1, -1]), np.eye(2)), np.diag([1, 1, -1, -1]))
    K = matops.kron(ALPHA, ALPHA)
    expected = np.zeros((4, 4))
    expected[0, 3] = 1
    np.testing.assert_allclose(K, expected)


def test_kron_mixed_product(rng):
    A, C = matops.random_complex(rng, 2), matops.random_complex(rng, 2)
    B, D = matops.random_complex(rng, 3), matops.random_complex(rng, 3)
    lhs = matops.kron(A, B) @ matops.kron(C, D)
    np.testing.assert_allclose(lhs, matops.kron(A @ C, B @ D), rtol=1e-12, atol=1e-12)


def test_kron_size_cap():
    with pytest.raises(SizeError):
        matops.kron(np.eye(4), np.eye(4), max_dim=8)


def test_sparse_kron_matches_dense():
    factors = [SIGMA3, ALPHA, np.eye(2)]
    S = matops.sparse_kron_all(factors)
    assert scipy.sparse.issparse(S)
    assert np.allclose(S.toarray(), matops.kron_all(factors))
    assert matops.frob(S) == pytest.approx(matops.frob(matops.kron_all(factors)))
    B = matops.sparse_kron_all([ALPHA.conj().T, SIGMA3, np.eye(2)])
    assert scipy.sparse.issparse(matops.commutator(S, B))
    assert np.allclose(matops.commutator(S, B).toarray(), matops.commutator(S.toarray(), B.toarray()))
    with pytest.raises(SizeError):
        matops.sparse_kron_all([np.eye(4), np.eye(4)], max_dim=8)


def test_validation_rejects_bad_input():
    with pytest.raises(ShapeError):
        matops.as_matrix(np.ones((2, 3)))
    with pytest.raises(DomainError):
        matops.as_matrix(np.array([[np.nan, 0], [0, 1]]))
    with pytest.raises(ShapeError):
        matops.commutator(np.eye(2), np.eye(3))


def test_dagger():
    np.testing.assert_allclose(matops.dagger(ALPHA), ALPHA.T)
    np.testing.assert_allclose(matops.dagger([[0, 1j], [0, 0]]), [[0, 0], [-1j, 0]])


def test_dagger_reverses_products(rng):
    A, B = matops.random_complex(rng, 5), matops.random_complex(rng, 5)
    np.testing.assert_allclose(matops.dagger(A @ B), matops.dagger(B) @ matops.dagger(A), rtol=1e-12)


def test_commutator_examples():
    A = np.arange(4).reshape(2, 2)
    np.testing.assert_allclose(matops.commutator(A, A), 0)
    np.testing.assert_allclose(matops.anticommutator(ALPHA, ALPHA.T), np.eye(2))
    np.testing.assert_allclose(matops.commutator(SIGMA3, ALPHA), 2 * ALPHA)


# ── inverse / eig ────────────────────────────────────────────────────────────

@pytest.mark.parametrize("A,expected", [
    (np.diag([1.0, -1.0]), np.diag([1.0, -1.0])),
    (np.diag([2.0, -1.0]), np.diag([0.5, -1.0])),
    (np.array([[1.0, 1.0], [0.0, 1.0]]), np.array([[1.0, -1.0], [0.0, 1.0]])),
])
def test_inverse_examples(A, expected):
    np.testing.assert_allclose(matops.inverse(A), expected, atol=1e-14)


def test_inverse_reports_condition_and_singularity():
    _, cond = matops.inverse(np.diag([4.0, 1.0]), return_condition=True)
    assert cond == pytest.approx(4.0)
    with pytest.raises(SingularMatrixError) as err:
        matops.inverse([[1, 1], [1, 1]])
    assert err.value.smallest_singular_value < 1e-12


def test_condition_number():
    assert matops.condition_number(np.diag([4.0, -1.0])) == pytest.approx(4.0)
    assert matops.condition_number(np.eye(3)) == pytest.approx(1.0)
    assert matops.condition_number([[1, 1], [1, 1]]) > 1e12


def test_reports_share_the_default_tolerance():
    from utils import reports

    assert reports.DEFAULT_TOL is matops.DEFAULT_TOL


def test_eig_examples():
    dec = matops.eig(np.diag([3.0, 1.0, 1.0]))
    assert sorted(dec.eigenvalues.real) == pytest.approx([1, 1, 3])
    assert dec.diagonalizable

    assert sorted(matops.eig(SIGMA3).eigenvalues.real) == pytest.approx([-1, 1])

    jordan = matops.eig(ALPHA)
    np.testing.assert_allclose(jordan.eigenvalues, [0, 0])
    assert not jordan.diagonalizable


def test_eig_reconstruction(rng):
    A = matops.random_complex(rng, 16)
    dec = matops.eig(A)
    assert dec.diagonalizable
    np.testing.assert_allclose(np.linalg.norm(dec.eigenvectors, axis=0), 1.0)
    assert dec.reconstruction_residual(A) <= 1e-9


def test_numeric_error_is_a_linalg_error():
    assert issubclass(NumericError, np.linalg.LinAlgError)


# ── inertia / square root ────────────────────────────────────────────────────

def test_inertia_examples():
    assert matops.inertia_of(np.eye(4)) == Inertia(4, 0, 0)
    assert matops.inertia_of(SIGMA3) == Inertia(1, 1, 0)
    assert matops.inertia_of(matops.kron(SIGMA3, SIGMA3, SIGMA3)) == Inertia(4, 4, 0)
    assert matops.inertia_of(np.diag([1.0, 0.0])) == Inertia(1, 0, 1)


def test_inertia_definiteness():
    assert Inertia(4, 0, 0).is_definite
    assert Inertia(0, 3, 0).is_definite
    assert not Inertia(1, 1, 0).is_definite
    assert not Inertia(1, 0, 1).is_definite


def test_inertia_rejects_non_hermitian():
    with pytest.raises(DomainError):
        matops.inertia_of(ALPHA)


def test_sylvester_law(rng):
    for _ in range(20):
        H = matops.random_hermitian(rng, 4)
        S = matops.random_invertible(rng, 4)
        assert matops.inertia_of(S.conj().T @ H @ S) == matops.inertia_of(H)


@pytest.mark.parametrize("A,expected", [
    (np.eye(3), np.eye(3)),
    (np.diag([4.0, 9.0]), np.diag([2.0, 3.0])),
])
def test_sqrt_pos_def_examples(A, expected):
    np.testing.assert_allclose(matops.sqrt_pos_def(A), expected, atol=1e-14)


def test_sqrt_pos_def_square(rng):
    A = np.array([[2.0, 1.0], [1.0, 2.0]])
    S = matops.sqrt_pos_def(A)
    np.testing.assert_allclose(S @ S, A, atol=1e-12)
    M = matops.random_metric(rng, 5)
    S = matops.sqrt_pos_def(M)
    assert matops.is_hermitian(S)
    np.testing.assert_allclose(S @ S, M, rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize("A", [SIGMA3, np.diag([1.0, 0.0])])
def test_sqrt_pos_def_rejects(A):
    with pytest.raises(DomainError):
        matops.sqrt_pos_def(A)


# ── involutions / grouping ───────────────────────────────────────────────────

def test_involution_split_diagonal_keeps_index_order():
    T = np.diag([1.0, -1.0, 1.0, -1.0])
    split = matops.involution_split(T)
    np.testing.assert_allclose(split.v_plus, np.eye(4)[:, [0, 2]])
    np.testing.assert_allclose(split.v_minus, np.eye(4)[:, [1, 3]])


def test_involution_split_non_hermitian(rng):
    S = matops.random_invertible(rng, 4)
    T = np.linalg.inv(S) @ np.diag([1.0, 1.0, -1.0, -1.0]) @ S
    split = matops.involution_split(T)
    np.testing.assert_allclose(T @ split.v_plus, split.v_plus, atol=1e-10)
    np.testing.assert_allclose(T @ split.v_minus, -split.v_minus, atol=1e-10)
    np.testing.assert_allclose(split.w_plus @ split.v_minus, 0, atol=1e-10)


def test_involution_split_rejects_non_involution():
    with pytest.raises(DomainError):
        matops.involution_split(np.diag([1.0, 2.0]))


def test_group_eigenvalues():
    groups = matops.group_eigenvalues([2.0, 0.0, 1.0, 1.0 + 1e-13, 2.0 - 1e-13])
    assert [sorted(g) for g in groups] == [[1], [2, 3], [0, 4]]


def test_gap_histogram_smallest_gap():
    hist = matops.gap_histogram([0.0, 1.0, 3.0])
    assert hist["smallestRelativeGap"] == pytest.approx(1.0 / 3.0)
    assert sum(hist["counts"]) == 2
