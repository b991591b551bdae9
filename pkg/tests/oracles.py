"""Independent reference computations shared by several test modules."""

import math
import warnings

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy import integrate


def sigma_series(k):
    c = np.zeros(k + 3)
    c[k], c[k + 2] = 1.0, -1.0
    return c


def rl_derivative(k, mu, x, side):
    """Riemann-Liouville derivative of sigma_k at x by adaptive quadrature.

    Because sigma_k vanishes at both ends the derivative equals the
    fractional integral of sigma_k', which ``quad`` handles with an
    algebraic weight.
    """
    dser = npleg.legder(sigma_series(k))
    f = lambda s: npleg.legval(s, dser)
    if side == "left":
        val, _ = integrate.quad(f, -1.0, x, weight="alg", wvar=(0.0, -mu), epsabs=1e-12, epsrel=1e-12)
        return val / math.gamma(1 - mu)
    val, _ = integrate.quad(f, x, 1.0, weight="alg", wvar=(-mu, 0.0), epsabs=1e-12, epsrel=1e-12)
    return -val / math.gamma(1 - mu)


def brute_force_stiffness(N, alpha):
    """``B(sigma_k, sigma_l)`` on [-1, 1] from the defining inner products."""
    mu = alpha / 2
    n = N - 1

    def integrand(x):
        left = np.array([rl_derivative(k, mu, x, "left") for k in range(n)])
        right = np.array([rl_derivative(k, mu, x, "right") for k in range(n)])
        return np.outer(right, left) + np.outer(left, right)

    with warnings.catch_warnings():
        # endpoint sub-intervals of zero length trip quad's roundoff heuristics
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad_vec(integrand, -1.0, 1.0, epsabs=1e-9, epsrel=1e-9)
    return val / (2 * math.cos(alpha * math.pi / 2))
