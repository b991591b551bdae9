"""Convergence and scheme-comparison studies built on :func:`runner.run`."""

from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import Optional, Sequence

import numpy as np

from .basis import DomainMap, basis_values
from .assembly import build_operators
from .cn_sgm import DEFAULT_MAX_ITER, DEFAULT_TOL
from .diagnostics import DEFAULT_MU_FACTOR, convergence_rate, error_norms, eval_grid
from .errors import ParameterError
from .runner import RunReport, run

__all__ = [
    "ConvergenceRow",
    "SpaceRow",
    "CompareRow",
    "StudyFailure",
    "temporal_study",
    "spatial_study",
    "compare_study",
]


@dataclass(frozen=True)
class ConvergenceRow:
    tau: float
    err_u_l2: float
    rate_u: Optional[float]
    err_phi_l2: float
    rate_phi: Optional[float]
    err_phi_linf: float
    rate_linf: Optional[float]
    cpu_seconds: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SpaceRow:
    N: int
    err_u_l2: float
    err_phi_l2: float
    err_phi_linf: float
    cpu_seconds: float


@dataclass(frozen=True)
class CompareRow:
    scheme: str
    tau: float
    error: float
    err_u_l2: float
    err_phi_l2: float
    cpu_seconds: float
    per_step_seconds: float
    steps: int


class StudyFailure(Exception):
    """A run inside a study ended early; carries the offending report."""

    def __init__(self, report: RunReport):
        super().__init__(f"{report.scheme} run with N={report.N}, tau={report.tau} stopped: {report.blowup}")
        self.report = report


def _checked_run(problem, N, tau, T, scheme, **kw) -> RunReport:
    rep = run(problem, N, tau, T, scheme=scheme, **kw)
    if rep.blowup is not None:
        raise StudyFailure(rep)
    return rep


def _exact_reference(problem, T):
    exact = problem.exact
    if exact is None:
        return None
    return (lambda x: exact(x, T)[0]), (lambda x: exact(x, T)[1])


def _errors(rep: RunReport, ref_u, ref_phi, grid):
    st = rep.final_state
    eu, _ = error_norms(st.U, ref_u, rep.ops, grid=grid)
    ep, ep_inf = error_norms(st.Phi, ref_phi, rep.ops, grid=grid)
    return eu, ep, ep_inf


def temporal_study(problem, N: int, tau_list: Sequence[float], T: Optional[float] = None,
                   scheme: str = "cn", tau_ref: Optional[float] = None,
                   mu_factor: int = DEFAULT_MU_FACTOR, tol: float = DEFAULT_TOL,
                   max_iter: int = DEFAULT_MAX_ITER, init_mode: str = "b_proj",
                   use_exact: bool = True) -> list[ConvergenceRow]:
    """Errors at ``T`` for each step size, with observed orders.

    The reference is the exact solitary wave when one exists (classical
    limit) and ``use_exact`` is set; otherwise a CN run at the same ``N`` with
    ``tau_ref`` (default ``min(tau_list) / 10``).
    """
    if len(tau_list) < 1:
        raise ParameterError("tau_list is empty")
    T = problem.T if T is None else T
    kw = dict(tol=tol, max_iter=max_iter, init_mode=init_mode)
    ops = build_operators(N, DomainMap(problem.a, problem.b), problem.alpha)
    grid = eval_grid(ops, mu_factor)
    exact = _exact_reference(problem, T) if use_exact else None
    if exact is not None:
        ref_u, ref_phi = exact
    else:
        tau_ref = min(tau_list) / 10.0 if tau_ref is None else tau_ref
        ref = _checked_run(problem, N, tau_ref, T, "cn", ops=ops, **kw).final_state
        ref_u, ref_phi = ref.U, ref.Phi

    errs, times = [], []
    for tau in tau_list:
        rep = _checked_run(problem, N, tau, T, scheme, ops=ops, **kw)
        errs.append(_errors(rep, ref_u, ref_phi, grid))
        times.append(float(np.sum(rep.step_times)))
    cols = list(zip(*errs))
    rates = [[None] + convergence_rate(c, list(tau_list)) for c in cols]
    return [
        ConvergenceRow(tau, cols[0][k], rates[0][k], cols[1][k], rates[1][k], cols[2][k], rates[2][k], times[k])
        for k, tau in enumerate(tau_list)
    ]


def spatial_study(problem, N_list: Sequence[int], tau: float, T: Optional[float] = None,
                  scheme: str = "cn", N_ref: Optional[int] = None,
                  mu_factor: int = DEFAULT_MU_FACTOR, tol: float = DEFAULT_TOL,
                  max_iter: int = DEFAULT_MAX_ITER, init_mode: str = "b_proj",
                  use_exact: bool = True) -> list[SpaceRow]:
    """Errors at ``T`` for each polynomial degree at fixed ``tau``.

    Without an exact solution the reference is a run at ``N_ref`` (default
    ``2 * max(N_list)``) with the same ``tau``, so the temporal error largely
    cancels and the rows show the spatial error.
    """
    if len(N_list) < 1:
        raise ParameterError("N_list is empty")
    T = problem.T if T is None else T
    kw = dict(tol=tol, max_iter=max_iter, init_mode=init_mode)
    exact = _exact_reference(problem, T) if use_exact else None
    ref_state = None
    if exact is None:
        N_ref = 2 * max(N_list) if N_ref is None else N_ref
        ref_state = _checked_run(problem, N_ref, tau, T, "cn", **kw).final_state

    rows = []
    for N in N_list:
        rep = _checked_run(problem, N, tau, T, scheme, **kw)
        grid = eval_grid(rep.ops, mu_factor)
        if exact is not None:
            ref_u, ref_phi = exact
        else:
            # reference coefficients evaluated on this grid's reference nodes
            xhat = (2.0 * grid.x - (problem.a + problem.b)) / (problem.b - problem.a)
            table = basis_values(N_ref, xhat)
            ref_u, ref_phi = table @ ref_state.U, table @ ref_state.Phi
        eu, ep, ep_inf = _errors(rep, ref_u, ref_phi, grid)
        rows.append(SpaceRow(N, eu, ep, ep_inf, float(np.sum(rep.step_times))))
    return rows


def compare_study(problem, N: int, tau_list: Sequence[float], T: Optional[float] = None,
                  schemes: Sequence[str] = ("cn", "esav"), tau_ref: Optional[float] = None,
                  mu_factor: int = DEFAULT_MU_FACTOR, tol: float = DEFAULT_TOL,
                  max_iter: int = DEFAULT_MAX_ITER, init_mode: str = "b_proj",
                  use_exact: bool = True) -> list[CompareRow]:
    """Combined error ``||u - U|| + ||phi - Phi||`` and stepping time per scheme and step."""
    T = problem.T if T is None else T
    kw = dict(tol=tol, max_iter=max_iter, init_mode=init_mode)
    ops = build_operators(N, DomainMap(problem.a, problem.b), problem.alpha)
    grid = eval_grid(ops, mu_factor)
    exact = _exact_reference(problem, T) if use_exact else None
    if exact is not None:
        ref_u, ref_phi = exact
    else:
        tau_ref = min(tau_list) / 10.0 if tau_ref is None else tau_ref
        ref = _checked_run(problem, N, tau_ref, T, "cn", ops=ops, **kw).final_state
        ref_u, ref_phi = ref.U, ref.Phi

    rows = []
    for scheme in schemes:
        for tau in tau_list:
            rep = _checked_run(problem, N, tau, T, scheme, ops=ops, **kw)
            eu, ep, _ = _errors(rep, ref_u, ref_phi, grid)
            rows.append(CompareRow(scheme, tau, eu + ep, eu, ep, float(np.sum(rep.step_times)),
                                   rep.per_step_wall_time, rep.steps_taken))
    return rows
