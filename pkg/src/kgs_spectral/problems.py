"""Benchmark problems: solitary waves and the one/two-soliton examples."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ParameterError

__all__ = [
    "ProblemSpec",
    "soliton_u",
    "soliton_phi",
    "soliton_phi_t",
    "example1",
    "example2",
    "custom_problem",
]

Field = Callable[[np.ndarray], np.ndarray]


def _sech(z):
    z = np.abs(np.asarray(z, dtype=float))
    e = np.exp(-z)
    return 2.0 * e / (1.0 + e * e)


def _lorentz(nu: float) -> float:
    if not abs(nu) < 1.0:
        raise ParameterError(f"soliton velocity must satisfy |nu| < 1, got {nu}")
    return math.sqrt(1.0 - nu * nu)


def soliton_u(x, t: float, nu: float, chi0: float = 0.0):
    """Nucleon component of the classical (alpha = 2) solitary wave."""
    s = _lorentz(nu)
    x = np.asarray(x, dtype=float)
    amp = 3.0 * math.sqrt(2.0) / (4.0 * s) * _sech((x - nu * t - chi0) / (2.0 * s)) ** 2
    omega = (1.0 - nu**2 + nu**4) / (2.0 * s * s)
    return amp * np.exp(1j * (nu * x + omega * t))


def soliton_phi(x, t: float, nu: float, chi0: float = 0.0):
    s = _lorentz(nu)
    x = np.asarray(x, dtype=float)
    return 3.0 / (4.0 * s * s) * _sech((x - nu * t - chi0) / (2.0 * s)) ** 2


def soliton_phi_t(x, t: float, nu: float, chi0: float = 0.0):
    s = _lorentz(nu)
    z = (np.asarray(x, dtype=float) - nu * t - chi0) / (2.0 * s)
    return 3.0 * nu / (4.0 * s**3) * _sech(z) ** 2 * np.tanh(z)


@dataclass(frozen=True)
class ProblemSpec:
    """Model coefficients, domain, horizon and initial fields.

    ``u0``, ``phi0``, ``phi1`` are vectorized callables of the physical
    coordinate. ``exact`` (optional) maps ``(x, t)`` to ``(u, phi, phi_t)``
    and is only meaningful when the closed form actually solves the model,
    i.e. at ``alpha = 2`` for the soliton.
    """

    alpha: float
    lam: float
    kappa1: float
    kappa2: float
    gamma: float
    eta: float
    a: float
    b: float
    T: float
    u0: Field = field(repr=False, compare=False)
    phi0: Field = field(repr=False, compare=False)
    phi1: Field = field(repr=False, compare=False)
    name: str = "custom"
    exact_solution: Optional[Callable] = field(default=None, repr=False, compare=False)
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not 1.0 < self.alpha <= 2.0:
            raise ParameterError(f"alpha must lie in (1, 2], got {self.alpha}")
        for name in ("lam", "kappa1", "kappa2", "gamma"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be non-negative, got {getattr(self, name)}")
        if not self.b > self.a:
            raise ParameterError(f"domain needs b > a, got ({self.a}, {self.b})")
        if self.T < 0:
            raise ParameterError(f"horizon T must be non-negative, got {self.T}")

    @property
    def exact(self):
        """Exact solution callable, or None when no closed form applies."""
        if self.alpha == 2.0:
            return self.exact_solution
        return None

    def with_(self, **changes) -> "ProblemSpec":
        return replace(self, **changes)

    def params(self) -> dict:
        return {
            "alpha": self.alpha,
            "lambda": self.lam,
            "kappa1": self.kappa1,
            "kappa2": self.kappa2,
            "gamma": self.gamma,
            "eta": self.eta,
            "a": self.a,
            "b": self.b,
            "T": self.T,
            **self.info,
        }


def example1(alpha: float = 2.0, T: float = 1.0, nu: float = 0.8, chi0: float = -10.0) -> ProblemSpec:
    """Single moving soliton on (-20, 20) with Yukawa coupling only."""
    _lorentz(nu)

    def exact(x, t):
        return soliton_u(x, t, nu, chi0), soliton_phi(x, t, nu, chi0), soliton_phi_t(x, t, nu, chi0)

    return ProblemSpec(
        alpha=alpha, lam=1.0, kappa1=1.0, kappa2=0.0, gamma=1.0, eta=1.0,
        a=-20.0, b=20.0, T=T,
        u0=lambda x: soliton_u(x, 0.0, nu, chi0),
        phi0=lambda x: soliton_phi(x, 0.0, nu, chi0),
        phi1=lambda x: soliton_phi_t(x, 0.0, nu, chi0),
        name="example1",
        exact_solution=exact,
        info={"nu": nu, "chi0": chi0},
    )


def example2(
    kappa2: float = 0.0,
    alpha: float = 2.0,
    T: float = 1.0,
    p1: float = -10.0,
    p2: float = 10.0,
    nu1: float = 0.8,
    nu2: float = -0.8,
    chi0: float = 0.0,
) -> ProblemSpec:
    """Two counter-propagating solitons; ``kappa2`` switches on the quartic term."""
    _lorentz(nu1)
    _lorentz(nu2)

    def u0(x):
        return soliton_u(x - p1, 0.0, nu1, chi0) + soliton_u(x - p2, 0.0, nu2, chi0)

    def phi0(x):
        return soliton_phi(x - p1, 0.0, nu1, chi0) + soliton_phi(x - p2, 0.0, nu2, chi0)

    def phi1(x):
        return soliton_phi_t(x - p1, 0.0, nu1, chi0) + soliton_phi_t(x - p2, 0.0, nu2, chi0)

    return ProblemSpec(
        alpha=alpha, lam=1.0, kappa1=1.0, kappa2=kappa2, gamma=1.0, eta=1.0,
        a=-20.0, b=20.0, T=T, u0=u0, phi0=phi0, phi1=phi1,
        name="example2",
        info={"p1": p1, "p2": p2, "nu1": nu1, "nu2": nu2, "chi0": chi0},
    )


def tabulated_field(x_samples, values) -> Field:
    """Cubic-spline interpolant of sampled data (real or complex)."""
    x_samples = np.asarray(x_samples, dtype=float)
    values = np.asarray(values)
    if np.iscomplexobj(values):
        re = CubicSpline(x_samples, values.real)
        im = CubicSpline(x_samples, values.imag)
        return lambda x: re(x) + 1j * im(x)
    spline = CubicSpline(x_samples, values)
    return lambda x: spline(x)


def custom_problem(
    u0: Field, phi0: Field, phi1: Field, *, alpha: float, lam: float = 1.0,
    kappa1: float = 1.0, kappa2: float = 0.0, gamma: float = 1.0, eta: float = 1.0,
    a: float = -20.0, b: float = 20.0, T: float = 1.0, name: str = "custom",
) -> ProblemSpec:
    return ProblemSpec(
        alpha=alpha, lam=lam, kappa1=kappa1, kappa2=kappa2, gamma=gamma, eta=eta,
        a=a, b=b, T=T, u0=u0, phi0=phi0, phi1=phi1, name=name,
    )
