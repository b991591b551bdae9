import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.polynomial import legendre as npleg
from scipy import integrate, special

from kgs_spectral.basis import (
    DomainMap,
    basis_derivs,
    basis_table,
    basis_values,
    frac_deriv_basis_regular,
    gamma_ratio,
    map_points,
    unmap_points,
)
from kgs_spectral.errors import ParameterError
from kgs_spectral.quadrature import gauss_lobatto


def _sigma_series(k):
    c = np.zeros(k + 3)
    c[k], c[k + 2] = 1.0, -1.0
    return c


def test_values_match_legendre_series():
    x = np.linspace(-1, 1, 29)
    vals = basis_values(10, x)
    assert vals.shape == (29, 9)
    for k in range(9):
        np.testing.assert_allclose(vals[:, k], npleg.legval(x, _sigma_series(k)), atol=1e-13)


def test_derivatives_match_legendre_series():
    x = np.linspace(-1, 1, 31)
    d = basis_derivs(12, x)
    for k in range(11):
        np.testing.assert_allclose(d[:, k], npleg.legval(x, npleg.legder(_sigma_series(k))), atol=1e-11)


def test_basis_vanishes_at_endpoints():
    tab = basis_table(40, gauss_lobatto(50), with_deriv=True)
    assert np.max(np.abs(tab.values[[0, -1]])) < 1e-13
    assert tab.deriv_values.shape == tab.values.shape
    assert tab.size == 39


def test_columns_have_exact_degree():
    x = np.cos(np.linspace(0, np.pi, 25))
    vals = basis_values(8, x)
    for k in range(7):
        coef = npleg.legfit(x, vals[:, k], k + 2)
        resid = vals[:, k] - npleg.legval(x, coef)
        assert np.max(np.abs(resid)) < 1e-12
        assert abs(coef[-1]) > 0.5


def test_basis_size_check():
    with pytest.raises(ParameterError):
        basis_values(2, np.zeros(3))


@given(st.floats(-50, 50), st.floats(0.1, 80), st.floats(-1, 1))
def test_domain_map_roundtrip(a, length, xhat):
    dm = DomainMap(a, a + length)
    x = map_points(dm, xhat)
    assert a - 1e-9 <= x <= a + length + 1e-9
    assert unmap_points(dm, x) == pytest.approx(xhat, abs=1e-9)
    assert dm.jacobian == pytest.approx(length / 2)


def test_domain_map_rejects_empty_interval():
    with pytest.raises(ParameterError):
        DomainMap(1.0, 1.0)


def test_gamma_ratio():
    n = np.arange(8)
    mu = 0.7
    np.testing.assert_allclose(gamma_ratio(n, mu), special.gamma(n + 1) / special.gamma(n + 1 - mu), rtol=1e-13)
    # pole of Gamma(n + 1 - mu) at mu = 1, n = 0
    assert gamma_ratio(np.array([0]), 1.0)[0] == 0.0
    big = gamma_ratio(np.array([1000]), 0.75)[0]
    assert np.isfinite(big) and big == pytest.approx(1000.0**0.75, rel=1e-3)


@pytest.mark.parametrize("side", ["left", "right"])
def test_unit_order_recovers_classical_derivative(side):
    x = np.linspace(-0.99, 0.99, 41)
    g = frac_deriv_basis_regular(9, 1.0, side, x)
    factor = (1 + x) if side == "left" else (1 - x)
    # D_left = d/dx and D_right = -d/dx at order one
    sign = 1.0 if side == "left" else -1.0
    expected = sign * factor[:, None] * basis_derivs(9, x)
    np.testing.assert_allclose(g, expected, atol=1e-11)


def _rl_left(k, mu, x):
    # sigma_k vanishes at -1, so D^mu = (1/Gamma(1-mu)) int_{-1}^x (x-s)^{-mu} sigma_k'(s) ds
    dser = npleg.legder(_sigma_series(k))
    val, _ = integrate.quad(lambda s: npleg.legval(s, dser), -1.0, x, weight="alg",
                            wvar=(0.0, -mu), epsabs=1e-13, epsrel=1e-13)
    return val / math.gamma(1 - mu)


def _rl_right(k, mu, x):
    dser = npleg.legder(_sigma_series(k))
    val, _ = integrate.quad(lambda s: npleg.legval(s, dser), x, 1.0, weight="alg",
                            wvar=(-mu, 0.0), epsabs=1e-13, epsrel=1e-13)
    return -val / math.gamma(1 - mu)


@pytest.mark.parametrize("mu", [0.6, 0.75, 0.9])
def test_fractional_derivative_against_direct_integral(mu):
    x = np.array([-0.8, -0.3, 0.1, 0.55, 0.9])
    gl = frac_deriv_basis_regular(7, mu, "left", x)
    gr = frac_deriv_basis_regular(7, mu, "right", x)
    for j, xj in enumerate(x):
        for k in range(6):
            assert (1 + xj) ** (-mu) * gl[j, k] == pytest.approx(_rl_left(k, mu, xj), abs=1e-9)
            assert (1 - xj) ** (-mu) * gr[j, k] == pytest.approx(_rl_right(k, mu, xj), abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(mu=st.floats(0.51, 0.99), x=st.floats(-1, 1))
def test_left_right_reflection(mu, x):
    # sigma_k(-x) = (-1)^k sigma_k(x) swaps left and right derivatives
    gl = frac_deriv_basis_regular(10, mu, "left", np.array([x]))[0]
    gr = frac_deriv_basis_regular(10, mu, "right", np.array([-x]))[0]
    signs = (-1.0) ** np.arange(9)
    np.testing.assert_allclose(gl, signs * gr, atol=1e-10 * max(1.0, np.abs(gl).max()))


def test_fractional_derivative_rejects_bad_order():
    with pytest.raises(ParameterError):
        frac_deriv_basis_regular(5, 0.4, "left", np.zeros(2))
    with pytest.raises(ParameterError):
        frac_deriv_basis_regular(5, 0.7, "middle", np.zeros(2))
