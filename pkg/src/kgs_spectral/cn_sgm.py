"""Crank-Nicolson spectral Galerkin stepper with decoupled fixed-point solves."""

from __future__ import annotations

import math
import time
from typing import Optional

import numpy as np

from .assembly import OperatorSet, nonlinear_vectors, synthesize
from .errors import DivergenceError, NonConvergenceError, ParameterError
from .state import SpectralState, StepStats

DEFAULT_TOL = 1e-14
DEFAULT_MAX_ITER = 200

__all__ = ["extrapolate_guess", "psi_update", "u_rhs_linear", "phi_rhs_linear", "cn_step"]


def extrapolate_guess(curr: SpectralState, prev: Optional[SpectralState]):
    """Starting iterate for the next level: copy on the first step, else ``2 curr - prev``."""
    if prev is None:
        return curr.U.copy(), curr.Phi.copy()
    return 2.0 * curr.U - prev.U, 2.0 * curr.Phi - prev.Phi


def psi_update(Phi_new, state: SpectralState, tau: float) -> np.ndarray:
    """``Psi^{n+1}`` from the midpoint relation ``dPhi/dt = Psi``."""
    return (2.0 / tau) * (Phi_new - state.Phi) - state.Psi


def phi_rhs_linear(state: SpectralState, ops: OperatorSet, problem, tau: float) -> np.ndarray:
    q = 0.25 * tau * tau
    M, S = ops.M, ops.S
    return ((1.0 - q * problem.eta**2) * M - q * problem.gamma * S) @ state.Phi + tau * (M @ state.Psi)


def u_rhs_linear(state: SpectralState, ops: OperatorSet, problem, tau: float) -> np.ndarray:
    return 1j * (ops.M @ state.U) + (0.25 * problem.lam * tau) * (ops.S @ state.U)


def _l2(v, M) -> float:
    return math.sqrt(max(float(np.real(np.vdot(v, M @ v))), 0.0))


def cn_step(state: SpectralState, prev: Optional[SpectralState], ops: OperatorSet, problem,
            tau: float, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER):
    """Advance one Crank-Nicolson step; returns ``(new_state, StepStats)``.

    Each sweep freezes the nonlinear loads at the current iterate and solves
    the U- and Phi-systems independently; the sweep stops once the L2 sum of
    the increments drops to ``tol``.
    """
    if tol <= 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    t0 = time.perf_counter()
    table = ops.lgl_table
    Fu = ops.u_matrix(problem.lam, tau)
    Fphi = ops.phi_matrix(problem.gamma, problem.eta, tau)
    k1, k2 = problem.kappa1, problem.kappa2
    q = 0.25 * tau * tau
    t_new = state.t + tau

    rhs_u = u_rhs_linear(state, ops, problem, tau)
    rhs_phi = phi_rhs_linear(state, ops, problem, tau)
    Un_vals = synthesize(state.U, table)
    Phin_vals = synthesize(state.Phi, table)

    U, Phi = extrapolate_guess(state, prev)
    residual = math.inf
    for it in range(1, max_iter + 1):
        # a diverging iterate overflows here; the non-finite residual reports it
        with np.errstate(over="ignore", invalid="ignore"):
            N1, N2, N3, N4 = nonlinear_vectors(
                Un_vals, synthesize(U, table), Phin_vals, synthesize(Phi, table), ops
            )
            U_next = Fu.solve(rhs_u - 0.25 * tau * (k1 * N1 + k2 * N2))
            Phi_next = Fphi.solve(rhs_phi + q * (k1 * N3 + k2 * N4))
            residual = _l2(U_next - U, ops.M) + _l2(Phi_next - Phi, ops.M)
        U, Phi = U_next, Phi_next
        if not math.isfinite(residual):
            raise DivergenceError(f"fixed-point iterate became non-finite at t={t_new:g}",
                                  t=t_new, residual=residual)
        if residual <= tol:
            break
    else:
        raise NonConvergenceError(
            f"fixed-point iteration stalled at t={t_new:g} after {max_iter} sweeps "
            f"(residual {residual:.3e})", t=t_new, residual=residual,
        )
    new = SpectralState(U, Phi, psi_update(Phi, state, tau), t_new)
    return new, StepStats(it, residual, time.perf_counter() - t0)

