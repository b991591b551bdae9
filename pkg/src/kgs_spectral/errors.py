"""Exception hierarchy shared by the solvers and the CLI."""

from __future__ import annotations


class KGSError(Exception):
    """Base class for all package errors."""


class ParameterError(KGSError, ValueError):
    """An argument violates a documented precondition."""


class InternalError(KGSError, RuntimeError):
    """A numerical routine that should always succeed did not (a bug)."""


class SingularMatrixError(KGSError, ArithmeticError):
    """Raised by the LU factorization when a pivot underflows."""


class StepFailure(KGSError):
    """A time step could not be completed.

    Attributes
    ----------
    t : float or None
        Time level the step was trying to reach.
    residual : float or None
        Last fixed-point increment, when one exists.
    """

    kind = "failure"

    def __init__(self, message: str, t: float | None = None, residual: float | None = None):
        super().__init__(message)
        self.t = t
        self.residual = residual


class NonConvergenceError(StepFailure):
    kind = "non_convergence"


class DivergenceError(StepFailure):
    kind = "divergence"


class OverflowBlowupError(StepFailure):
    """The scaled auxiliary-variable exponent left the representable range."""

    kind = "overflow"
