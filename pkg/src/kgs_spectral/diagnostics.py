"""Discrete invariants, error norms, convergence rates and blow-up detection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .assembly import OperatorSet, synthesize
from .basis import basis_values, map_points
from .errors import StepFailure
from .quadrature import gauss_lobatto
from .state import SpectralState

BLOWUP_THRESHOLD = 1e8
DEFAULT_MU_FACTOR = 3

__all__ = [
    "InvariantSample",
    "BlowupRecord",
    "mass",
    "seminorm_sq",
    "norm_sq",
    "nonlinear_potential",
    "energy_cn",
    "energy_esav",
    "EvalGrid",
    "eval_grid",
    "error_norms",
    "convergence_rate",
    "detect_blowup",
    "relative_deviation",
]


@dataclass(frozen=True)
class InvariantSample:
    t: float
    mass: float
    energy: float
    rm: float
    re: float
    iterations: int


@dataclass(frozen=True)
class BlowupRecord:
    t: float
    kind: str
    detail: str = ""

    def as_dict(self) -> dict:
        return {"t": self.t, "kind": self.kind, "detail": self.detail}


def norm_sq(coeffs, ops: OperatorSet) -> float:
    """``||v||^2`` in L2 of the field with the given coefficients."""
    c = np.asarray(coeffs)
    return float(np.real(np.vdot(c, ops.M @ c)))


def mass(U, ops: OperatorSet) -> float:
    return norm_sq(U, ops)


def seminorm_sq(coeffs, ops: OperatorSet) -> float:
    """Squared fractional semi-norm ``B(v, v)``."""
    c = np.asarray(coeffs)
    return float(np.real(np.vdot(c, ops.S @ c)))


def nonlinear_potential(U_vals, Phi_vals, ops: OperatorSet, kappa1: float, kappa2: float) -> float:
    """``int (kappa1 |u|^2 + kappa2 |u|^4) phi dx`` by LGL quadrature."""
    a2 = np.abs(U_vals) ** 2
    integrand = (kappa1 * a2 + kappa2 * a2 * a2) * Phi_vals
    return float(ops.dmap.jacobian * np.dot(ops.lgl.weights, integrand))


def _quadratic_energy(state: SpectralState, ops: OperatorSet, problem) -> float:
    return (
        norm_sq(state.Psi, ops)
        + problem.gamma * seminorm_sq(state.Phi, ops)
        + problem.eta**2 * norm_sq(state.Phi, ops)
        + problem.lam * seminorm_sq(state.U, ops)
    )


def energy_cn(state: SpectralState, ops: OperatorSet, problem) -> float:
    """Original discrete energy conserved by the Crank-Nicolson scheme."""
    U_vals = synthesize(state.U, ops.lgl_table)
    Phi_vals = synthesize(state.Phi, ops.lgl_table)
    pot = nonlinear_potential(U_vals, Phi_vals, ops, problem.kappa1, problem.kappa2)
    return _quadratic_energy(state, ops, problem) - 2.0 * pot


def energy_esav(state: SpectralState, ops: OperatorSet, problem) -> float:
    """Modified energy, with ``-ln P`` replacing the nonlinear potential."""
    ln_p = 0.0 if state.ln_p is None else state.ln_p
    return _quadratic_energy(state, ops, problem) - ln_p


def relative_deviation(value: float, ref: float) -> float:
    if ref == 0.0:
        return abs(value - ref)
    return abs(value - ref) / abs(ref)


@dataclass(frozen=True)
class EvalGrid:
    """Dense LGL grid (``mu_factor * N + 1`` nodes) used for error norms."""

    x: np.ndarray
    weights: np.ndarray
    table: np.ndarray

    def values(self, coeffs) -> np.ndarray:
        return self.table @ np.asarray(coeffs)


def eval_grid(ops: OperatorSet, mu_factor: int = DEFAULT_MU_FACTOR) -> EvalGrid:
    rule = gauss_lobatto(int(mu_factor) * ops.N + 1)
    x = map_points(ops.dmap, rule.nodes)
    return EvalGrid(x, ops.dmap.jacobian * rule.weights, basis_values(ops.N, rule.nodes))


def error_norms(num_coeffs, reference, ops: OperatorSet, mu_factor: int = DEFAULT_MU_FACTOR,
                grid: Optional[EvalGrid] = None):
    """L2 and max-norm distance between a numerical field and a reference.

    ``reference`` is a callable of x, or an array of values on the evaluation
    grid, or a coefficient vector of the same size as ``num_coeffs``.
    """
    grid = grid or eval_grid(ops, mu_factor)
    num = grid.values(num_coeffs)
    if callable(reference):
        ref = np.asarray(reference(grid.x))
    else:
        ref = np.asarray(reference)
        if ref.shape == np.shape(num_coeffs):
            ref = grid.values(ref)
    diff = np.abs(num - ref)
    return math.sqrt(float(np.dot(grid.weights, diff**2))), float(np.max(diff))


def convergence_rate(errors: Sequence[float], steps: Sequence[float]) -> list:
    """Observed orders between consecutive entries; ``None`` where undefined."""
    rates = []
    for k in range(1, len(errors)):
        e0, e1 = errors[k - 1], errors[k]
        h0, h1 = steps[k - 1], steps[k]
        if e0 <= 0 or e1 <= 0 or h0 == h1:
            rates.append(None)
        else:
            rates.append(math.log(e0 / e1) / math.log(h0 / h1))
    return rates


def detect_blowup(t: float, state: Optional[SpectralState] = None, error: Optional[BaseException] = None,
                  U_vals=None, threshold: float = BLOWUP_THRESHOLD) -> Optional[BlowupRecord]:
    """Classify a step outcome; returns None for a healthy step."""
    if error is not None:
        if isinstance(error, StepFailure):
            residual = "" if error.residual is None else f"residual={error.residual:.3e}"
            return BlowupRecord(t if error.t is None else error.t, error.kind, residual or str(error))
        return BlowupRecord(t, "error", str(error))
    if state is not None and not state.is_finite():
        return BlowupRecord(t, "nan", "non-finite coefficients")
    if U_vals is not None:
        peak = float(np.max(np.abs(U_vals)))
        if not np.isfinite(peak):
            return BlowupRecord(t, "nan", "non-finite nodal values")
        if peak > threshold:
            return BlowupRecord(t, "threshold", f"max|U|={peak:.3e}")
    return None
