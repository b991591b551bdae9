"""Linearly implicit ESAV spectral Galerkin stepper.

The auxiliary variable ``P = exp(2 int (k1|u|^2 + k2|u|^4) phi)`` is kept as
``ln P`` throughout; the nonlinear coefficients only ever need the ratio
``P / exp(2 int ...)``, which is formed as one exponential of a difference.
"""

from __future__ import annotations

import math
import time

import numpy as np
from scipy.optimize import root_scalar

from .assembly import OperatorSet, galerkin_rhs, synthesize
from .cn_sgm import DEFAULT_MAX_ITER, DEFAULT_TOL, phi_rhs_linear, psi_update, u_rhs_linear
from .diagnostics import nonlinear_potential
from .errors import DivergenceError, NonConvergenceError, OverflowBlowupError
from .state import SpectralState, StepStats

EXP_LIMIT = 700.0
_LN2 = math.log(2.0)

__all__ = ["esav_init", "compute_fg_scaled", "esav_step", "esav_startup", "with_auxiliary"]


def esav_init(U_vals, Phi_vals, ops: OperatorSet, problem) -> float:
    """``ln P^0 = 2 int (k1|u0|^2 + k2|u0|^4) phi0 dx``."""
    return 2.0 * nonlinear_potential(U_vals, Phi_vals, ops, problem.kappa1, problem.kappa2)


def with_auxiliary(state: SpectralState, ops: OperatorSet, problem) -> SpectralState:
    """Attach ``ln P`` computed from the fields of ``state``."""
    U_vals = synthesize(state.U, ops.lgl_table)
    Phi_vals = synthesize(state.Phi, ops.lgl_table)
    return state.evolve(ln_p=esav_init(U_vals, Phi_vals, ops, problem))


def compute_fg_scaled(U_vals, Phi_vals, ln_p: float, ops: OperatorSet, problem, t: float | None = None):
    """Nodal values of ``P F(u, phi)`` and ``P G(u, phi)``."""
    k1, k2 = problem.kappa1, problem.kappa2
    a2 = np.abs(U_vals) ** 2
    expo = ln_p - esav_init(U_vals, Phi_vals, ops, problem)
    if not math.isfinite(expo):
        raise DivergenceError("auxiliary exponent is not finite", t=t)
    if abs(expo) > EXP_LIMIT:
        raise OverflowBlowupError(f"auxiliary exponent {expo:.3e} out of range", t=t)
    ratio = math.exp(expo)
    return (k1 + 2.0 * k2 * a2) * ratio, (k1 * a2 + k2 * a2 * a2) * ratio


def _linear_solves(state, ops, problem, tau, U_vals, Phi_vals, ln_p_mid, t_new):
    """Solve the two frozen-coefficient systems; return new fields and ``ln P``."""
    PF, PG = compute_fg_scaled(U_vals, Phi_vals, ln_p_mid, ops, problem, t=t_new)
    g = galerkin_rhs(PF * U_vals * Phi_vals, ops)
    h = galerkin_rhs(PG, ops)
    Fu = ops.u_matrix(problem.lam, tau)
    Fphi = ops.phi_matrix(problem.gamma, problem.eta, tau)
    U = Fu.solve(u_rhs_linear(state, ops, problem, tau) - tau * g)
    Phi = Fphi.solve(phi_rhs_linear(state, ops, problem, tau) + 0.5 * tau * tau * h)
    # coefficient form of 4 Re(PF u phi, U^{n+1} - U^n) + 2 (PG, Phi^{n+1} - Phi^n)
    ln_p = state.ln_p + 4.0 * float(np.real(np.vdot(U - state.U, g))) + 2.0 * float(np.dot(Phi - state.Phi, h))
    return U, Phi, ln_p


def _check_finite(U, Phi, ln_p, t):
    if not (math.isfinite(ln_p) and np.all(np.isfinite(U)) and np.all(np.isfinite(Phi))):
        raise DivergenceError(f"ESAV update became non-finite at t={t:g}", t=t)


def esav_step(state: SpectralState, prev: SpectralState, ops: OperatorSet, problem, tau: float):
    """One ESAV step from levels ``n`` and ``n - 1``: two linear solves, no iteration."""
    t0 = time.perf_counter()
    t_new = state.t + tau
    table = ops.lgl_table
    U_vals = synthesize(1.5 * state.U - 0.5 * prev.U, table)
    Phi_vals = synthesize(1.5 * state.Phi - 0.5 * prev.Phi, table)
    ln_p_mid = 1.5 * state.ln_p - 0.5 * prev.ln_p
    U, Phi, ln_p = _linear_solves(state, ops, problem, tau, U_vals, Phi_vals, ln_p_mid, t_new)
    _check_finite(U, Phi, ln_p, t_new)
    new = SpectralState(U, Phi, psi_update(Phi, state, tau), t_new, ln_p)
    return new, StepStats(1, 0.0, time.perf_counter() - t0)


def _frozen_loads(U_vals, Phi_vals, log_ratio: float, ops: OperatorSet, problem):
    """Load vectors ``g``, ``h`` with the auxiliary ratio fixed at ``exp(log_ratio)``."""
    k1, k2 = problem.kappa1, problem.kappa2
    a2 = np.abs(U_vals) ** 2
    r = math.exp(log_ratio)
    g = galerkin_rhs(r * (k1 + 2.0 * k2 * a2) * U_vals * Phi_vals, ops)
    h = galerkin_rhs(r * (k1 * a2 + k2 * a2 * a2), ops)
    return g, h


def _startup_fields(state, ops, problem, tau, log_ratio, U, Phi, tol, max_iter):
    """Midpoint fixed point for ``(U^1, Phi^1)`` at a frozen auxiliary ratio."""
    table = ops.lgl_table
    Fu = ops.u_matrix(problem.lam, tau)
    Fphi = ops.phi_matrix(problem.gamma, problem.eta, tau)
    rhs_u = u_rhs_linear(state, ops, problem, tau)
    rhs_phi = phi_rhs_linear(state, ops, problem, tau)
    for sweep in range(1, max_iter + 1):
        # a diverging iterate overflows here; the non-finite increment reports it
        with np.errstate(over="ignore", invalid="ignore"):
            g, h = _frozen_loads(synthesize(0.5 * (state.U + U), table),
                                 synthesize(0.5 * (state.Phi + Phi), table), log_ratio, ops, problem)
            U_next = Fu.solve(rhs_u - tau * g)
            Phi_next = Fphi.solve(rhs_phi + 0.5 * tau * tau * h)
            inc = _m_norm(U_next - U, ops) + _m_norm(Phi_next - Phi, ops)
        U, Phi = U_next, Phi_next
        if not math.isfinite(inc):
            raise DivergenceError("ESAV startup fields became non-finite", t=state.t + tau)
        if inc <= tol:
            return U, Phi, sweep
    raise NonConvergenceError(
        f"ESAV startup field iteration stalled after {max_iter} sweeps (increment {inc:.3e})",
        t=state.t + tau, residual=inc,
    )


def _m_norm(v, ops) -> float:
    return math.sqrt(max(float(np.real(np.vdot(v, ops.M @ v))), 0.0))


def esav_startup(state: SpectralState, ops: OperatorSet, problem, tau: float,
                 tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER):
    """First step by the fully implicit midpoint variant.

    The unknowns are ``U^1``, ``Phi^1`` and ``ln P^1``, coupled through the
    midpoint ratio ``P^{1/2} / exp(I(u^{1/2}, phi^{1/2}))``, where
    ``P^{1/2} = (P^0 + P^1) / 2`` is formed from the two logarithms.

    A joint sweep over all three expands for strong nonlinearity, so the
    log-ratio ``s`` is solved for as a scalar.
    For fixed ``s`` the fields come from the midpoint fixed point (a
    contraction like the CN sweep). The consistency condition
    ``s = ln P^{1/2} - I^{1/2}`` is then solved with a secant iteration.
    A final joint sweep confirms the increments are at ``tol``.
    """
    t0 = time.perf_counter()
    t_new = state.t + tau
    table = ops.lgl_table
    if problem.kappa1 == 0 and problem.kappa2 == 0:
        U, Phi, ln_p = _linear_solves(state, ops, problem, tau, synthesize(state.U, table),
                                      synthesize(state.Phi, table), state.ln_p, t_new)
        _check_finite(U, Phi, ln_p, t_new)
        new = SpectralState(U, Phi, psi_update(Phi, state, tau), t_new, ln_p)
        return new, StepStats(1, 0.0, time.perf_counter() - t0)

    work = {"U": state.U.copy(), "Phi": state.Phi.copy(), "sweeps": 0}

    def implied(s: float):
        U, Phi, sweeps = _startup_fields(state, ops, problem, tau, s, work["U"], work["Phi"], tol, max_iter)
        work.update(U=U, Phi=Phi)
        work["sweeps"] += sweeps
        g, h = _frozen_loads(synthesize(0.5 * (state.U + U), table),
                             synthesize(0.5 * (state.Phi + Phi), table), s, ops, problem)
        ln_p = state.ln_p + 4.0 * float(np.real(np.vdot(U - state.U, g))) + 2.0 * float(np.dot(Phi - state.Phi, h))
        ln_mid = float(np.logaddexp(state.ln_p, ln_p)) - _LN2
        s_hat = ln_mid - esav_init(synthesize(0.5 * (state.U + U), table),
                                   synthesize(0.5 * (state.Phi + Phi), table), ops, problem)
        if not math.isfinite(s_hat):
            raise DivergenceError("ESAV startup auxiliary became non-finite", t=t_new)
        if abs(s_hat) > EXP_LIMIT:
            raise OverflowBlowupError(f"auxiliary exponent {s_hat:.3e} out of range", t=t_new)
        return s_hat - s

    try:
        s1 = implied(0.0)
        sol = root_scalar(implied, x0=0.0, x1=s1, method="secant", xtol=1e-15, rtol=1e-15, maxiter=60)
        gap = abs(implied(sol.root)) if math.isfinite(sol.root) else math.inf
    except (OverflowBlowupError, NonConvergenceError):
        raise
    except (DivergenceError, ArithmeticError, ValueError) as exc:
        # the field sweep breaks at some trial ratio: the startup system is not solvable here
        raise NonConvergenceError(f"ESAV startup failed: {exc}", t=t_new) from exc
    if not math.isfinite(gap) or gap > 1e-12:
        raise NonConvergenceError(
            f"ESAV startup has no consistent auxiliary ratio near the data (gap {gap:.3e})",
            t=t_new, residual=gap,
        )

    # confirm with one joint sweep of the original midpoint map
    U, Phi = work["U"], work["Phi"]
    g, h = _frozen_loads(synthesize(0.5 * (state.U + U), table),
                         synthesize(0.5 * (state.Phi + Phi), table), sol.root, ops, problem)
    ln_p = state.ln_p + 4.0 * float(np.real(np.vdot(U - state.U, g))) + 2.0 * float(np.dot(Phi - state.Phi, h))
    U_mid = synthesize(0.5 * (state.U + U), table)
    Phi_mid = synthesize(0.5 * (state.Phi + Phi), table)
    ln_mid = float(np.logaddexp(state.ln_p, ln_p)) - _LN2
    U_next, Phi_next, ln_p_next = _linear_solves(state, ops, problem, tau, U_mid, Phi_mid, ln_mid, t_new)
    _check_finite(U_next, Phi_next, ln_p_next, t_new)
    field_inc = _m_norm(U_next - U, ops) + _m_norm(Phi_next - Phi, ops)
    aux_inc = abs(ln_p_next - ln_p)
    # ln P can be O(100): its increment floor is a few ulps of ln P, not tol
    aux_floor = max(tol, 16.0 * np.finfo(float).eps * abs(ln_p))
    if field_inc > 10.0 * tol or aux_inc > aux_floor:
        raise NonConvergenceError(
            f"ESAV startup sweep did not settle (field {field_inc:.3e}, aux {aux_inc:.3e})",
            t=t_new, residual=field_inc + aux_inc,
        )
    new = SpectralState(U_next, Phi_next, psi_update(Phi_next, state, tau), t_new, ln_p_next)
    return new, StepStats(work["sweeps"] + 1, field_inc + aux_inc, time.perf_counter() - t0)
