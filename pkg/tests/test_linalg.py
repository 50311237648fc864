"""Spectral decomposition, commutants and matrix serialization."""

import numpy as np
import pytest

from biham.linalg import (
    commutant_basis,
    matrix_from_json,
    matrix_norm,
    matrix_to_json,
    spectral_decompose,
)


def test_spectral_identity_single_cluster():
    spec = spectral_decompose(np.eye(2))
    assert sorted(np.round(spec.eigenvalues.real, 12)) == [1, 1]
    assert len(spec.clusters) == 1
    assert spec.defective == [False]


def test_spectral_diag_two_clusters():
    spec = spectral_decompose(np.diag([1.0, 3.0]))
    assert len(spec.clusters) == 2
    assert sorted(np.round(v.real, 12) for v in spec.cluster_values()) == [1, 3]


def test_spectral_rotation_pure_imaginary():
    spec = spectral_decompose(np.array([[0.0, 1.0], [-1.0, 0.0]]))
    vals = sorted(spec.eigenvalues, key=lambda z: z.imag)
    assert vals[0] == pytest.approx(-1j)
    assert vals[1] == pytest.approx(1j)


def test_spectral_residuals_bound():
    rng = np.random.default_rng(0)
    for _ in range(10):
        M = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        spec = spectral_decompose(M)
        resid = matrix_norm(M @ spec.eigenvectors - spec.eigenvectors * spec.eigenvalues[None, :])
        assert resid <= 1e-8 * matrix_norm(M) * 6


def test_spectral_defective_jordan_chain():
    M = np.array([[1.0, 1.0], [0.0, 1.0]])
    spec = spectral_decompose(M)
    assert len(spec.clusters) == 1
    assert spec.defective == [True]
    # rank sequence of (M - I)^j: 1, 0 -> one 2x2 Jordan block
    assert spec.generalized_ranks[0][:2] == [1, 0]


def test_commutant_identity_full_space():
    basis = commutant_basis(np.eye(3))
    assert len(basis) == 9


def test_commutant_distinct_diagonal():
    basis = commutant_basis(np.diag([1.0, 2.0]))
    assert len(basis) == 2
    for T in basis:
        assert abs(T[0, 1]) < 1e-12 and abs(T[1, 0]) < 1e-12


def test_commutant_rotation_block():
    G = np.array([[0.0, 1.0], [-1.0, 0.0]])
    basis = commutant_basis(G)
    assert len(basis) == 2  # span{I, G}
    for T in basis:
        assert matrix_norm(G @ T - T @ G) <= 1e-12 * max(1.0, matrix_norm(G) * matrix_norm(T))


def test_commutant_members_commute_property():
    rng = np.random.default_rng(7)
    for _ in range(5):
        G = rng.standard_normal((4, 4))
        for T in commutant_basis(G):
            assert matrix_norm(G @ T - T @ G) <= 1e-12 * matrix_norm(G) * max(1.0, matrix_norm(T))


def test_matrix_json_round_trip():
    rng = np.random.default_rng(1)
    M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    M2 = matrix_from_json(matrix_to_json(M))
    assert np.allclose(M, M2)
    R = rng.standard_normal((2, 5))  # non-square, real
    R2 = matrix_from_json(matrix_to_json(R))
    assert R2.dtype == float and np.allclose(R, R2)
