"""Boundary-vanishing Legendre basis ``L_k - L_{k+2}`` and its derivatives.

Index ``k`` runs over ``0 .. N-2`` so a basis of "size N" holds ``N - 1``
functions spanning the degree-``N`` polynomials that vanish at both ends.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ParameterError
from .quadrature import QuadRule, jacobi_table, legendre_table

__all__ = [
    "DomainMap",
    "BasisTable",
    "basis_values",
    "basis_derivs",
    "basis_table",
    "gamma_ratio",
    "frac_deriv_basis_regular",
    "map_points",
    "unmap_points",
]


@dataclass(frozen=True)
class DomainMap:
    """Affine map from ``[-1, 1]`` onto ``[a, b]``."""

    a: float
    b: float

    def __post_init__(self):
        if not self.b > self.a:
            raise ParameterError(f"domain needs b > a, got ({self.a}, {self.b})")

    @property
    def jacobian(self) -> float:
        return 0.5 * (self.b - self.a)

    @property
    def length(self) -> float:
        return self.b - self.a


def map_points(dmap: DomainMap, ref_points) -> np.ndarray:
    ref_points = np.asarray(ref_points, dtype=float)
    return 0.5 * ((dmap.b - dmap.a) * ref_points + (dmap.a + dmap.b))


def unmap_points(dmap: DomainMap, points) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    return (2.0 * points - (dmap.a + dmap.b)) / (dmap.b - dmap.a)


def _check_size(N: int) -> None:
    if N < 3:
        raise ParameterError(f"basis size N must be at least 3, got {N}")


def basis_values(N: int, x) -> np.ndarray:
    """``sigma_k(x)`` for ``k = 0..N-2``; shape ``x.shape + (N - 1,)``."""
    _check_size(N)
    L = legendre_table(N, x)
    return np.moveaxis(L[:-2] - L[2:], 0, -1)


def basis_derivs(N: int, x) -> np.ndarray:
    """``sigma_k'(x) = -(2k + 3) L_{k+1}(x)`` on the reference interval."""
    _check_size(N)
    L = legendre_table(N - 1, x)
    k = np.arange(N - 1)
    return -np.moveaxis(L[1:], 0, -1) * (2 * k + 3)


@dataclass(frozen=True)
class BasisTable:
    """Basis values (and optionally derivatives) tabulated at rule nodes.

    ``values[j, k]`` is ``sigma_k`` at ``rule.nodes[j]``.
    """

    N: int
    rule: QuadRule
    values: np.ndarray
    deriv_values: np.ndarray | None = None

    @property
    def size(self) -> int:
        return self.N - 1


def basis_table(N: int, rule: QuadRule, with_deriv: bool = False) -> BasisTable:
    values = basis_values(N, rule.nodes)
    values.setflags(write=False)
    deriv = None
    if with_deriv:
        deriv = basis_derivs(N, rule.nodes)
        deriv.setflags(write=False)
    return BasisTable(N, rule, values, deriv)


def gamma_ratio(n, mu: float) -> np.ndarray:
    """``Gamma(n + 1) / Gamma(n + 1 - mu)`` for integer ``n >= 0``.

    Evaluated through log-gamma; the pole at ``n + 1 - mu = 0`` gives 0.
    """
    n = np.asarray(n, dtype=float)
    z = n + 1.0 - mu
    out = np.zeros_like(n)
    ok = z > 0
    out[ok] = np.exp(gammaln(n[ok] + 1.0) - gammaln(z[ok]))
    return out


def frac_deriv_basis_regular(N: int, mu: float, side: str, points) -> np.ndarray:
    """Regular factor of the Riemann-Liouville derivative of each ``sigma_k``.

    For ``side="left"`` returns ``g_k`` with
    ``D^mu_{-1,x} sigma_k(x) = (1 + x)**(-mu) * g_k(x)``; for ``side="right"``
    the singular factor is ``(1 - x)**(-mu)``. Uses
    ``D^mu L_n = Gamma(n+1)/Gamma(n+1-mu) (1 +- x)**(-mu) P_n^{(+-mu, -+mu)}``.
    Shape ``points.shape + (N - 1,)``.
    """
    _check_size(N)
    if not 0.5 < mu <= 1.0:
        raise ParameterError(f"fractional order mu must lie in (1/2, 1], got {mu}")
    if side == "left":
        a, b = mu, -mu
    elif side == "right":
        a, b = -mu, mu
    else:
        raise ParameterError(f"side must be 'left' or 'right', got {side!r}")
    P = jacobi_table(N, a, b, points, strict=False)
    n = np.arange(N + 1)
    c = gamma_ratio(n, mu)
    D = P * c.reshape((-1,) + (1,) * (P.ndim - 1))
    return np.moveaxis(D[:-2] - D[2:], 0, -1)
