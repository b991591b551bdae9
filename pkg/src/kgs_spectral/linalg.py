"""Dense factor-once / solve-many linear algebra (LAPACK via scipy)."""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla

from .errors import ParameterError, SingularMatrixError

PIVOT_FLOOR = 1e-300


class LUFactorization:
    """Partial-pivoting LU of a square real or complex matrix.

    Immutable after construction; ``solve`` may be called concurrently.
    """

    def __init__(self, A):
        A = np.asarray(A)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ParameterError(f"LU needs a square matrix, got shape {A.shape}")
        lu, piv = sla.lu_factor(A, check_finite=True)
        if np.min(np.abs(np.diag(lu))) < PIVOT_FLOOR:
            raise SingularMatrixError("matrix is numerically singular")
        lu.setflags(write=False)
        self.lu = lu
        self.piv = piv
        self.shape = A.shape
        self.dtype = lu.dtype

    def solve(self, b):
        b = np.asarray(b)
        if b.shape[0] != self.shape[0]:
            raise ParameterError(f"rhs length {b.shape[0]} does not match {self.shape[0]}")
        if np.iscomplexobj(b) and not np.iscomplexobj(self.lu):
            re = sla.lu_solve((self.lu, self.piv), b.real, check_finite=False)
            im = sla.lu_solve((self.lu, self.piv), b.imag, check_finite=False)
            return re + 1j * im
        return sla.lu_solve((self.lu, self.piv), b, check_finite=False)


def lu_factor(A) -> LUFactorization:
    return LUFactorization(A)


def solve(F: LUFactorization, b):
    return F.solve(b)


def sym_eig_min(A, rtol: float = 1e-12) -> float:
    """Smallest eigenvalue of a real symmetric matrix."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ParameterError(f"expected a square matrix, got shape {A.shape}")
    scale = max(np.max(np.abs(A)), np.finfo(float).tiny)
    if np.max(np.abs(A - A.T)) > rtol * scale:
        raise ParameterError("sym_eig_min requires a symmetric matrix")
    return float(sla.eigh(A, eigvals_only=True, subset_by_index=[0, 0])[0])
