"""Galerkin operators: mass, Riesz stiffness, nonlinear load vectors, projections."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .basis import BasisTable, DomainMap, basis_table, frac_deriv_basis_regular, map_points
from .errors import ParameterError
from .linalg import LUFactorization
from .quadrature import QuadRule, gauss_jacobi, gauss_lobatto

__all__ = [
    "OperatorSet",
    "lgl_size",
    "build_mass",
    "build_stiffness",
    "cross_stiffness",
    "build_operators",
    "synthesize",
    "galerkin_rhs",
    "nonlinear_vectors",
    "project_initial",
]


def lgl_size(N: int) -> int:
    """LGL node count exact for the degree-5N nonlinear integrands."""
    return math.ceil(5 * N / 2) + 3


# closer to 2 than this, the classical operator is used: the fractional one is
# within O(2 - alpha) of it, while cancellation in 1/cos(alpha pi/2) grows
CLASSICAL_SNAP = 1e-6


def _check_alpha(alpha: float) -> None:
    if not 1.0 < alpha <= 2.0:
        raise ParameterError(f"alpha must lie in (1, 2], got {alpha}")


def build_mass(N: int, dmap: DomainMap) -> np.ndarray:
    if N < 3:
        raise ParameterError(f"basis size N must be at least 3, got {N}")
    k = np.arange(N - 1, dtype=float)
    M = np.diag(2.0 / (2 * k + 1) + 2.0 / (2 * k + 5))
    off = -2.0 / (2 * k[:-2] + 5)
    M += np.diag(off, 2) + np.diag(off, -2)
    return dmap.jacobian * M


def cross_stiffness(n_test: int, n_trial: int, dmap: DomainMap, alpha: float) -> np.ndarray:
    """``B(sigma_k, sigma_l)`` for trial size ``n_trial`` and test size ``n_test``.

    Rows index test functions ``l``, columns trial functions ``k``. For
    ``alpha < 2`` both cross products of left/right derivatives are integrated
    with a Gauss-Jacobi rule that absorbs the ``(1 -+ x)**(-alpha/2)`` factors.
    """
    _check_alpha(alpha)
    if 2.0 - alpha < CLASSICAL_SNAP:
        k = np.arange(min(n_test, n_trial) - 1)
        S = np.zeros((n_test - 1, n_trial - 1))
        S[k, k] = 2.0 * (2 * k + 3)
        return S / dmap.jacobian
    mu = 0.5 * alpha
    rule = gauss_jacobi((n_test + n_trial) // 2 + 2, -mu, -mu)
    w = rule.weights[:, None]
    left_trial = frac_deriv_basis_regular(n_trial, mu, "left", rule.nodes)
    right_trial = frac_deriv_basis_regular(n_trial, mu, "right", rule.nodes)
    if n_test == n_trial:
        A = right_trial.T @ (w * left_trial)
        cross = A + A.T
    else:
        left_test = frac_deriv_basis_regular(n_test, mu, "left", rule.nodes)
        right_test = frac_deriv_basis_regular(n_test, mu, "right", rule.nodes)
        cross = right_test.T @ (w * left_trial) + left_test.T @ (w * right_trial)
    scale = dmap.jacobian ** (1.0 - alpha)
    return scale * cross / (2.0 * math.cos(0.5 * alpha * math.pi))


def build_stiffness(N: int, dmap: DomainMap, alpha: float) -> np.ndarray:
    return cross_stiffness(N, N, dmap, alpha)


@dataclass
class OperatorSet:
    """Assembled operators for one ``(N, domain, alpha)`` triple.

    Treat as read-only once built; ``factorizations`` is a memo of step
    matrices filled lazily by :meth:`factor`.
    """

    N: int
    dmap: DomainMap
    alpha: float
    M: np.ndarray
    S: np.ndarray
    lgl: QuadRule
    lgl_table: BasisTable
    factorizations: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return self.N - 1

    @property
    def nodes(self) -> np.ndarray:
        """Physical LGL nodes."""
        return map_points(self.dmap, self.lgl.nodes)

    def factor(self, key, build) -> LUFactorization:
        F = self.factorizations.get(key)
        if F is None:
            F = LUFactorization(build())
            self.factorizations[key] = F
        return F

    def u_matrix(self, lam: float, tau: float) -> LUFactorization:
        """LU of ``i M - lam tau / 4 S``."""
        return self.factor(
            ("u", lam, tau), lambda: 1j * self.M - 0.25 * lam * tau * self.S
        )

    def phi_matrix(self, gamma: float, eta: float, tau: float) -> LUFactorization:
        """LU of ``M + gamma tau^2/4 S + eta^2 tau^2/4 M``."""
        q = 0.25 * tau * tau
        return self.factor(
            ("phi", gamma, eta, tau),
            lambda: (1.0 + q * eta * eta) * self.M + q * gamma * self.S,
        )


def build_operators(N: int, dmap: DomainMap, alpha: float, q_lgl: int | None = None) -> OperatorSet:
    _check_alpha(alpha)
    lgl = gauss_lobatto(q_lgl or lgl_size(N))
    return OperatorSet(
        N=N,
        dmap=dmap,
        alpha=alpha,
        M=build_mass(N, dmap),
        S=build_stiffness(N, dmap, alpha),
        lgl=lgl,
        lgl_table=basis_table(N, lgl),
    )


def synthesize(coeffs, table: BasisTable) -> np.ndarray:
    coeffs = np.asarray(coeffs)
    if coeffs.shape[0] != table.size:
        raise ParameterError(f"expected {table.size} coefficients, got {coeffs.shape[0]}")
    return table.values @ coeffs


def galerkin_rhs(point_values, ops: OperatorSet) -> np.ndarray:
    """``(f, sigma_l)`` by LGL quadrature from samples of ``f`` at the nodes."""
    f = np.asarray(point_values)
    if f.shape[0] != ops.lgl.size:
        raise ParameterError(f"expected {ops.lgl.size} nodal values, got {f.shape[0]}")
    w = ops.dmap.jacobian * ops.lgl.weights
    if f.ndim > 1:
        w = w.reshape((-1,) + (1,) * (f.ndim - 1))
    return ops.lgl_table.values.T @ (w * f)


def nonlinear_vectors(Un, Us, Phin, Phis, ops: OperatorSet):
    """Load vectors ``N1..N4`` of the fixed-point iteration (nodal inputs)."""
    Q = ops.lgl.size
    for arr in (Un, Us, Phin, Phis):
        if np.shape(arr) != (Q,):
            raise ParameterError(f"nodal arrays must have shape ({Q},), got {np.shape(arr)}")
    u_sum = Un + Us
    phi_sum = Phin + Phis
    an = np.abs(Un) ** 2
    as_ = np.abs(Us) ** 2
    prod = u_sum * phi_sum
    N1 = galerkin_rhs(prod, ops)
    N2 = galerkin_rhs((an + as_) * prod, ops)
    real_part = galerkin_rhs(np.stack([an + as_, an * an + as_ * as_], axis=1), ops)
    return N1, N2, real_part[:, 0], real_part[:, 1]


def _l2_coeffs(f, N: int, dmap: DomainMap) -> np.ndarray:
    rule = gauss_lobatto(lgl_size(N))
    table = basis_table(N, rule)
    values = f(map_points(dmap, rule.nodes))
    rhs = table.values.T @ (dmap.jacobian * rule.weights * values)
    return np.linalg.solve(build_mass(N, dmap), rhs)


def project_initial(f, ops: OperatorSet, mode: str = "b_proj") -> np.ndarray:
    """Coefficients of the projection of the field ``f`` (callable of x).

    ``l2`` is the mass-matrix projection; ``b_proj`` is the projection that is
    orthogonal with respect to the fractional bilinear form, computed from an
    L2 surrogate in the basis of size ``2N``.
    """
    if mode == "l2":
        values = np.asarray(f(ops.nodes))
        return np.linalg.solve(ops.M, galerkin_rhs(values, ops))
    if mode != "b_proj":
        raise ParameterError(f"projection mode must be 'b_proj' or 'l2', got {mode!r}")
    big = 2 * ops.N
    surrogate = _l2_coeffs(f, big, ops.dmap)
    S_rect = cross_stiffness(ops.N, big, ops.dmap, ops.alpha)
    return np.linalg.solve(ops.S, S_rect @ surrogate)
