"""Legendre/Jacobi polynomials and Gauss-type quadrature on [-1, 1]."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import betaln

from .errors import InternalError, ParameterError

NEWTON_TOL = 1e-15
NEWTON_MAXITER = 100

__all__ = [
    "QuadRule",
    "legendre_eval",
    "legendre_table",
    "jacobi_eval",
    "jacobi_table",
    "gauss_lobatto",
    "gauss_jacobi",
]


@dataclass(frozen=True)
class QuadRule:
    """Quadrature nodes and weights on the reference interval.

    ``kind`` is ``"lobatto"`` or ``"jacobi"``; for Jacobi rules ``a_exp`` and
    ``b_exp`` are the exponents of the weight ``(1-x)**a_exp * (1+x)**b_exp``
    that the rule integrates against.
    """

    nodes: np.ndarray
    weights: np.ndarray
    kind: str
    a_exp: float = 0.0
    b_exp: float = 0.0

    @property
    def size(self) -> int:
        return self.nodes.size

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Apply the rule to samples taken at ``nodes`` (along axis 0)."""
        return np.tensordot(self.weights, values, axes=(0, 0))


def _freeze(*arrays: np.ndarray) -> None:
    for arr in arrays:
        arr.setflags(write=False)


def legendre_table(nmax: int, x) -> np.ndarray:
    """Values of ``L_0 .. L_nmax`` at ``x``; shape ``(nmax + 1,) + x.shape``."""
    if nmax < 0:
        raise ParameterError(f"degree must be non-negative, got {nmax}")
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = x
    for k in range(1, nmax):
        out[k + 1] = ((2 * k + 1) * x * out[k] - k * out[k - 1]) / (k + 1)
    return out


def legendre_eval(n: int, x):
    """Legendre polynomial ``L_n(x)`` by the three-term recurrence."""
    return legendre_table(n, x)[n]


def _check_jacobi_params(a: float, b: float) -> None:
    if not (a > -1.0 and b > -1.0):
        raise ParameterError(f"Jacobi exponents must exceed -1, got a={a}, b={b}")


def jacobi_table(nmax: int, a: float, b: float, x, strict: bool = True) -> np.ndarray:
    """Values of ``P_0^{(a,b)} .. P_nmax^{(a,b)}`` at ``x``.

    ``strict=False`` admits ``a + b = 0`` with an exponent equal to -1, where
    the recurrence is still well defined (needed for first derivatives).
    """
    if nmax < 0:
        raise ParameterError(f"degree must be non-negative, got {nmax}")
    if strict or a + b != 0:
        _check_jacobi_params(a, b)
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x
    ab = a + b
    for n in range(1, nmax):
        c = 2 * n + ab
        denom = 2.0 * (n + 1) * (n + ab + 1) * c
        lin = (c + 1) * (c + 2) * c
        shift = (c + 1) * (a * a - b * b)
        prev = 2.0 * (n + a) * (n + b) * (c + 2)
        out[n + 1] = ((lin * x + shift) * out[n] - prev * out[n - 1]) / denom
    return out


def jacobi_eval(n: int, a: float, b: float, x):
    """Jacobi polynomial ``P_n^{(a,b)}(x)`` by the three-term recurrence."""
    return jacobi_table(n, a, b, x)[n]


@lru_cache(maxsize=None)
def gauss_lobatto(Q: int) -> QuadRule:
    """Legendre-Gauss-Lobatto rule with ``Q`` nodes (exact to degree 2Q-3).

    Interior nodes are the zeros of ``L'_{Q-1}``, found by Newton iteration on
    ``(1 - x**2) L'_{Q-1}(x)`` started from Chebyshev-Gauss-Lobatto points.
    """
    if Q < 2:
        raise ParameterError(f"Lobatto rule needs at least 2 nodes, got {Q}")
    n = Q - 1
    x = -np.cos(np.pi * np.arange(Q) / n)
    for _ in range(NEWTON_MAXITER):
        tab = legendre_table(n, x)
        ln, lnm1 = tab[n], tab[n - 1]
        dx = (x * ln - lnm1) / ((n + 1) * ln)
        x = x - dx
        if np.max(np.abs(dx)) <= NEWTON_TOL:
            break
    else:
        raise InternalError(f"Lobatto Newton iteration did not converge for Q={Q}")
    x[0], x[-1] = -1.0, 1.0
    # enforce exact mirror symmetry of the node set
    x = 0.5 * (x - x[::-1])
    ln = legendre_eval(n, x)
    w = 2.0 / (n * (n + 1) * ln**2)
    _freeze(x, w)
    return QuadRule(x, w, "lobatto")


def _golub_welsch_nodes(Q: int, a: float, b: float) -> np.ndarray:
    ab = a + b
    diag = np.empty(Q)
    diag[0] = (b - a) / (ab + 2.0)
    k = np.arange(1, Q, dtype=float)
    c = 2 * k + ab
    diag[1:] = (b * b - a * a) / (c * (c + 2.0))
    off = np.empty(Q - 1)
    if Q > 1:
        # n = 1 written with (n + a + b) / (2n + a + b - 1) cancelled
        off[0] = 4.0 * (1 + a) * (1 + b) / ((2 + ab) ** 2 * (3 + ab))
        k = np.arange(2, Q, dtype=float)
        c = 2 * k + ab
        off[1:] = 4 * k * (k + a) * (k + b) * (k + ab) / (c**2 * (c + 1) * (c - 1))
        off = np.sqrt(off)
    return np.sort(eigh_tridiagonal(diag, off, eigvals_only=True))


@lru_cache(maxsize=None)
def gauss_jacobi(Q: int, a: float, b: float) -> QuadRule:
    """Gauss-Jacobi rule for the weight ``(1-x)**a (1+x)**b``.

    Exact for ``weight * p`` with ``deg p <= 2Q - 1``. Nodes start from the
    eigenvalues of the Jacobi matrix and are polished by Newton iteration on
    ``P_Q^{(a,b)}``; weights use the closed form in terms of ``P_Q'``.
    """
    if Q < 1:
        raise ParameterError(f"Gauss-Jacobi rule needs at least 1 node, got {Q}")
    _check_jacobi_params(a, b)
    a, b = float(a), float(b)
    x = _golub_welsch_nodes(Q, a, b)

    def value_and_slope(x):
        p = jacobi_eval(Q, a, b, x)
        dp = 0.5 * (Q + a + b + 1) * jacobi_eval(Q - 1, a + 1, b + 1, x)
        return p, dp

    for _ in range(NEWTON_MAXITER):
        p, dp = value_and_slope(x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) <= NEWTON_TOL:
            break
    else:
        raise InternalError(f"Gauss-Jacobi Newton iteration did not converge for Q={Q}")
    if a == b:
        x = 0.5 * (x - x[::-1])
    _, dp = value_and_slope(x)
    # closed form up to a constant, normalized by the exact zeroth moment
    w = 1.0 / ((1.0 - x**2) * dp**2)
    moment0 = math.exp((a + b + 1) * math.log(2.0) + betaln(a + 1, b + 1))
    w *= moment0 / w.sum()
    _freeze(x, w)
    return QuadRule(x, w, "jacobi", a, b)
