"""Run a problem to its horizon with either scheme and collect diagnostics."""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from .assembly import OperatorSet, build_operators, project_initial, synthesize
from .basis import DomainMap, basis_values, unmap_points
from .cn_sgm import DEFAULT_MAX_ITER, DEFAULT_TOL, cn_step
from .diagnostics import (
    BLOWUP_THRESHOLD,
    BlowupRecord,
    InvariantSample,
    detect_blowup,
    energy_cn,
    energy_esav,
    mass,
    relative_deviation,
)
from .errors import ParameterError, StepFailure
from .esav_sgm import esav_startup, esav_step, with_auxiliary
from .state import SpectralState

SCHEMES = ("cn", "esav")

__all__ = ["RunReport", "Snapshot", "initial_state", "step_count", "run", "SCHEMES"]


@dataclass(frozen=True)
class Snapshot:
    t: float
    x: np.ndarray
    u: np.ndarray
    phi: np.ndarray


@dataclass
class RunReport:
    scheme: str
    problem: object
    N: int
    tau: float
    samples: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    final_state: Optional[SpectralState] = None
    blowup: Optional[BlowupRecord] = None
    assembly_time: float = 0.0
    total_wall_time: float = 0.0
    step_times: list = field(default_factory=list)
    iteration_histogram: Counter = field(default_factory=Counter)
    ops: Optional[OperatorSet] = field(default=None, repr=False)

    @property
    def steps_taken(self) -> int:
        return len(self.step_times)

    @property
    def per_step_wall_time(self) -> float:
        return float(np.mean(self.step_times)) if self.step_times else 0.0

    @property
    def max_rm(self) -> float:
        return max((s.rm for s in self.samples), default=0.0)

    @property
    def max_re(self) -> float:
        return max((s.re for s in self.samples), default=0.0)

    def summary(self) -> dict:
        return {
            "scheme": self.scheme,
            "problem": getattr(self.problem, "name", "custom"),
            "params": self.problem.params(),
            "N": self.N,
            "tau": self.tau,
            "steps": self.steps_taken,
            "t_final": self.final_state.t if self.final_state is not None else 0.0,
            "assembly_seconds": self.assembly_time,
            "stepping_seconds": float(np.sum(self.step_times)),
            "per_step_seconds": self.per_step_wall_time,
            "total_seconds": self.total_wall_time,
            "max_rm": self.max_rm,
            "max_re": self.max_re,
            "initial_energy": self.samples[0].energy if self.samples else None,
            "iteration_histogram": {str(k): v for k, v in sorted(self.iteration_histogram.items())},
            "blowup": self.blowup.as_dict() if self.blowup else None,
        }


def step_count(T: float, tau: float) -> int:
    if tau <= 0:
        raise ParameterError(f"tau must be positive, got {tau}")
    n = int(round(T / tau))
    if abs(n * tau - T) > 1e-9 * max(1.0, abs(T)):
        raise ParameterError(f"T={T} is not an integer multiple of tau={tau}")
    return n


def initial_state(problem, ops: OperatorSet, init_mode: str = "b_proj") -> SpectralState:
    return SpectralState(
        project_initial(problem.u0, ops, init_mode),
        np.real(project_initial(problem.phi0, ops, init_mode)),
        np.real(project_initial(problem.phi1, ops, init_mode)),
        0.0,
    )


def run(
    problem,
    N: int,
    tau: float,
    T: Optional[float] = None,
    scheme: str = "cn",
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    init_mode: str = "b_proj",
    sample_every: int = 1,
    snapshot_times: Iterable[float] = (),
    snapshot_x: Optional[np.ndarray] = None,
    observers: Iterable[Callable] = (),
    ops: Optional[OperatorSet] = None,
    blowup_threshold: float = BLOWUP_THRESHOLD,
) -> RunReport:
    """Project the initial data and march to ``T`` (defaults to ``problem.T``).

    Step failures (stalled fixed point, non-finite values, auxiliary-variable
    overflow) and ``max|U| > blowup_threshold`` end the run early with a
    :class:`BlowupRecord` on the report instead of raising.
    """
    if scheme not in SCHEMES:
        raise ParameterError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    if sample_every < 1:
        raise ParameterError(f"sample_every must be >= 1, got {sample_every}")
    T = problem.T if T is None else T
    nsteps = step_count(T, tau)
    wall0 = time.perf_counter()
    if ops is None:
        ops = build_operators(N, DomainMap(problem.a, problem.b), problem.alpha)
    elif ops.N != N or ops.alpha != problem.alpha:
        raise ParameterError("supplied operators do not match N / alpha")
    ops.u_matrix(problem.lam, tau)
    ops.phi_matrix(problem.gamma, problem.eta, tau)
    state = initial_state(problem, ops, init_mode)
    energy = energy_cn
    if scheme == "esav":
        state = with_auxiliary(state, ops, problem)
        energy = energy_esav
    report = RunReport(scheme, problem, N, tau, ops=ops)
    report.assembly_time = time.perf_counter() - wall0

    snap_steps = {step_count(ts, tau) for ts in snapshot_times if 0 <= ts <= T}
    if snapshot_x is None:
        snapshot_x = np.linspace(problem.a, problem.b, 401)
    snap_table = basis_values(N, unmap_points(ops.dmap, snapshot_x)) if snap_steps else None

    m0 = mass(state.U, ops)
    e0 = energy(state, ops, problem)

    def record(st: SpectralState, iterations: int, step: int):
        if step in snap_steps:
            report.snapshots.append(
                Snapshot(st.t, snapshot_x, snap_table @ st.U, snap_table @ st.Phi)
            )
        if step % sample_every and step != nsteps:
            return
        m = mass(st.U, ops)
        e = energy(st, ops, problem)
        sample = InvariantSample(st.t, m, e, relative_deviation(m, m0), relative_deviation(e, e0), iterations)
        report.samples.append(sample)
        for obs in observers:
            obs(sample, st)

    record(state, 0, 0)
    prev = None
    for n in range(nsteps):
        try:
            if scheme == "cn":
                new, stats = cn_step(state, prev, ops, problem, tau, tol, max_iter)
            elif n == 0:
                new, stats = esav_startup(state, ops, problem, tau, tol, max_iter)
            else:
                new, stats = esav_step(state, prev, ops, problem, tau)
        except StepFailure as exc:
            exc.t = (n + 1) * tau
            report.blowup = detect_blowup(exc.t, error=exc)
            break
        # n * tau instead of accumulated sums keeps times exact on the grid
        new = new.evolve(t=(n + 1) * tau)
        report.step_times.append(stats.wall_time)
        report.iteration_histogram[stats.iterations] += 1
        blow = detect_blowup(new.t, new, U_vals=synthesize(new.U, ops.lgl_table),
                             threshold=blowup_threshold)
        if blow is not None:
            report.blowup = blow
            prev, state = state, new
            break
        prev, state = state, new
        record(state, stats.iterations, n + 1)
    report.final_state = state
    report.total_wall_time = time.perf_counter() - wall0
    return report
