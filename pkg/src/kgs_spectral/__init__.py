"""Legendre spectral Galerkin solvers for the fractional Klein-Gordon-Schrodinger system.

Two time integrators share one spatial discretization: a Crank-Nicolson
scheme solved by decoupled fixed-point sweeps (conserves mass and energy),
and a linearly implicit exponential scalar auxiliary variable scheme
(conserves a modified energy).
"""

from .assembly import OperatorSet, build_operators
from .basis import DomainMap
from .cn_sgm import cn_step
from .diagnostics import (
    BlowupRecord,
    InvariantSample,
    convergence_rate,
    energy_cn,
    energy_esav,
    error_norms,
    mass,
)
from .errors import (
    DivergenceError,
    KGSError,
    NonConvergenceError,
    OverflowBlowupError,
    ParameterError,
    SingularMatrixError,
    StepFailure,
)
from .esav_sgm import esav_startup, esav_step
from .problems import ProblemSpec, custom_problem, example1, example2
from .runner import RunReport, run
from .state import SpectralState
from .studies import compare_study, spatial_study, temporal_study

__version__ = "0.1.0"

__all__ = [
    "BlowupRecord",
    "DivergenceError",
    "DomainMap",
    "InvariantSample",
    "KGSError",
    "NonConvergenceError",
    "OperatorSet",
    "OverflowBlowupError",
    "ParameterError",
    "ProblemSpec",
    "RunReport",
    "SingularMatrixError",
    "SpectralState",
    "StepFailure",
    "build_operators",
    "cn_step",
    "compare_study",
    "convergence_rate",
    "custom_problem",
    "energy_cn",
    "energy_esav",
    "error_norms",
    "esav_startup",
    "esav_step",
    "example1",
    "example2",
    "mass",
    "run",
    "spatial_study",
    "temporal_study",
]
