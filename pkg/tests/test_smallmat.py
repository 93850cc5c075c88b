import numpy as np
import pytest
from scipy.integrate import simpson
from scipy.linalg import expm

from src.exceptions import DimensionError, DomainError, NonFiniteError, NoRealPrincipalLog, SingularMatrix
from src.smallmat import (
    as_matrix, as_vector, commutator, det, drive_integral, inverse, mat_exp, mat_log_principal,
    rel_error, solve, trace
)


def test_as_matrix_rejects_bad_input():
    with pytest.raises(DimensionError):
        as_matrix([1.0, 2.0])
    with pytest.raises(NonFiniteError):
        as_matrix([[1.0, np.nan]])
    # DimensionError is also a ValueError
    with pytest.raises(ValueError):
        as_matrix(np.zeros((2, 2, 2)))


def test_as_vector_flattens_columns():
    assert as_vector([[1.0], [2.0]]).shape == (2,)
    with pytest.raises(DimensionError):
        as_vector(np.ones((2, 2)))


def test_mat_exp_diagonal():
    E = mat_exp(np.diag([1.0, -2.0]), 0.5)
    np.testing.assert_allclose(E, np.diag([np.exp(0.5), np.exp(-1.0)]), rtol=1e-14)


def test_mat_exp_zero_is_identity():
    np.testing.assert_array_equal(mat_exp(np.zeros((3, 3))), np.eye(3))


def test_mat_exp_semigroup(rng):
    for n in range(2, 7):
        A = rng.normal(size=(n, n)) / np.sqrt(n)
        s, t = 0.3, 0.45
        assert rel_error(mat_exp(A, s + t), mat_exp(A, s) @ mat_exp(A, t)) <= 1e-12


def test_mat_exp_empty():
    assert mat_exp(np.zeros((0, 0))).shape == (0, 0)


def test_log_inverts_exp(rng):
    for _ in range(10):
        A = 0.3 * rng.uniform(-1.0, 1.0, (3, 3))
        L = mat_log_principal(expm(A))
        assert rel_error(L, A) < 1e-10
        assert L.dtype == np.float64


def test_log_of_rotation_keeps_angle():
    theta = 2.5
    R = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    L = mat_log_principal(R)
    np.testing.assert_allclose(L, [[0.0, -theta], [theta, 0.0]], atol=1e-12)


@pytest.mark.parametrize('M', [
    np.diag([-1.0, 2.0]),
    -np.eye(2),
    np.array([[-0.5, 0.0, 0.0], [0.0, 1.0, 0.2], [0.0, 0.0, 3.0]]),
])
def test_log_rejects_negative_real_eigenvalues(M):
    with pytest.raises(NoRealPrincipalLog):
        mat_log_principal(M)


def test_log_rejects_singular():
    with pytest.raises(SingularMatrix):
        mat_log_principal(np.diag([1.0, 0.0]))


def test_drive_integral_invertible_a():
    A = np.array([[-1.0, 0.5], [0.2, -2.0]])
    B = np.array([[1.0], [0.5]])
    T = 0.7
    expected = np.linalg.solve(A, (expm(A * T) - np.eye(2)) @ B)
    np.testing.assert_allclose(drive_integral(A, B, T), expected, rtol=1e-12)


def test_drive_integral_singular_a():
    B = np.array([[2.0], [-1.0]])
    np.testing.assert_allclose(drive_integral(np.zeros((2, 2)), B, 0.3), 0.3 * B, rtol=1e-14)

    nilpotent = np.array([[0.0, 1.0], [0.0, 0.0]])
    T = 0.4
    np.testing.assert_allclose(drive_integral(nilpotent, [[0.0], [1.0]], T),
                               [[T * T / 2.0], [T]], rtol=1e-13)


def test_drive_integral_matches_quadrature():
    A = np.array([[0.0, -1e4], [1e4, -1000.0]])
    B = np.array([[1e4], [0.0]])
    T = 4e-6
    tau = np.linspace(0.0, T, 10_001)
    samples = np.array([(expm(A * t) @ B)[:, 0] for t in tau])
    expected = simpson(samples, x=tau, axis=0).reshape(-1, 1)
    np.testing.assert_allclose(drive_integral(A, B, T), expected, rtol=1e-8)


def test_det_of_exp_follows_trace(rng):
    A = rng.normal(size=(4, 4))
    t = 0.6
    assert det(mat_exp(A, t)) == pytest.approx(np.exp(t * trace(A)), rel=1e-11)


def test_drive_integral_negative_duration():
    with pytest.raises(DomainError):
        drive_integral(np.eye(2), np.ones((2, 1)), -1e-3)


def test_commutator_is_antisymmetric(rng):
    P = rng.normal(size=(3, 3))
    Q = rng.normal(size=(3, 3))
    np.testing.assert_allclose(commutator(P, Q), -commutator(Q, P), atol=1e-14)
    np.testing.assert_array_equal(commutator(P, P), np.zeros((3, 3)))


def test_trace_and_det():
    M = np.array([[2.0, 1.0], [1.0, 3.0]])
    assert trace(M) == 5.0
    assert det(M) == pytest.approx(5.0)


def test_inverse_and_solve_reject_singular():
    S = np.array([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(SingularMatrix):
        inverse(S)
    with pytest.raises(SingularMatrix):
        solve(S, [1.0, 1.0])
    np.testing.assert_allclose(solve(np.diag([2.0, 4.0]), [2.0, 2.0]), [1.0, 0.5])


def test_rel_error_zero_reference_is_absolute():
    assert rel_error([[3.0, 4.0]], [[0.0, 0.0]]) == pytest.approx(5.0)
