import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kgs_spectral.errors import ParameterError, SingularMatrixError
from kgs_spectral.linalg import lu_factor, solve, sym_eig_min


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 40), seed=st.integers(0, 2**31), cplx=st.booleans())
def test_solve_matches_numpy(n, seed, cplx):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n)) + n * np.eye(n)
    if cplx:
        A = A + 1j * rng.standard_normal((n, n))
    b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    F = lu_factor(A)
    np.testing.assert_allclose(solve(F, b), np.linalg.solve(A, b), rtol=1e-10, atol=1e-12)


def test_real_factor_complex_rhs():
    A = np.array([[4.0, 1.0], [2.0, 3.0]])
    b = np.array([1 + 2j, -1j])
    x = lu_factor(A).solve(b)
    np.testing.assert_allclose(A @ x, b, atol=1e-14)


@pytest.mark.filterwarnings("ignore::scipy.linalg.LinAlgWarning")
def test_singular_matrix_detected():
    with pytest.raises(SingularMatrixError):
        lu_factor(np.zeros((3, 3)))


def test_shape_checks():
    with pytest.raises(ParameterError):
        lu_factor(np.ones((2, 3)))
    F = lu_factor(np.eye(3))
    with pytest.raises(ParameterError):
        F.solve(np.ones(4))


def test_factorization_is_immutable():
    F = lu_factor(np.eye(3) * 2)
    with pytest.raises(ValueError):
        F.lu[0, 0] = 1.0


def test_sym_eig_min(rng):
    B = rng.standard_normal((12, 12))
    A = B @ B.T + 0.5 * np.eye(12)
    assert sym_eig_min(A) == pytest.approx(np.linalg.eigvalsh(A)[0], rel=1e-12)
    with pytest.raises(ParameterError):
        sym_eig_min(B)
