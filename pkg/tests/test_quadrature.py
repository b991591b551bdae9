import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from kgs_spectral.errors import ParameterError
from kgs_spectral.quadrature import (
    gauss_jacobi,
    gauss_lobatto,
    jacobi_eval,
    jacobi_table,
    legendre_eval,
    legendre_table,
)


@pytest.mark.parametrize("n, x, expected", [(0, 0.3, 1.0), (1, -0.7, -0.7), (2, 0.5, -0.125)])
def test_legendre_small_degrees(n, x, expected):
    assert legendre_eval(n, x) == pytest.approx(expected, abs=1e-15)


@given(st.integers(0, 60))
def test_legendre_endpoint_values(n):
    assert legendre_eval(n, 1.0) == pytest.approx(1.0, abs=1e-12)
    assert legendre_eval(n, -1.0) == pytest.approx((-1.0) ** n, abs=1e-12)


def test_legendre_table_matches_scipy():
    x = np.linspace(-1, 1, 37)
    tab = legendre_table(40, x)
    assert tab.shape == (41, 37)
    for n in (0, 3, 17, 40):
        np.testing.assert_allclose(tab[n], special.eval_legendre(n, x), atol=1e-13)
    assert np.all(np.abs(tab) <= 1 + 1e-13)


@pytest.mark.parametrize(
    "n, a, b, x, expected",
    [(0, 0.75, -0.75, 0.2, 1.0), (1, 0.75, -0.75, 0.0, 0.75), (1, 1.0, -1.0, 0.4, 1.4)],
)
def test_jacobi_small_degrees(n, a, b, x, expected):
    # P_1^(-1,1) would need the relaxed path; (1, -1) is a > -1 only on one side
    if b == -1.0:
        val = jacobi_table(n, a, b, np.array([x]), strict=False)[n, 0]
    else:
        val = jacobi_eval(n, a, b, x)
    assert val == pytest.approx(expected, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(0, 30),
    a=st.floats(-0.95, 2.0),
    b=st.floats(-0.95, 2.0),
    x=st.floats(-1.0, 1.0),
)
def test_jacobi_matches_scipy(n, a, b, x):
    ref = special.eval_jacobi(n, a, b, x)
    assert jacobi_eval(n, a, b, x) == pytest.approx(ref, rel=1e-11, abs=1e-11)


def test_jacobi_rejects_bad_exponents():
    with pytest.raises(ParameterError):
        jacobi_eval(3, -1.0, 0.0, 0.1)
    with pytest.raises(ParameterError):
        jacobi_eval(-1, 0.0, 0.0, 0.1)


def test_lobatto_tiny_rules():
    r2 = gauss_lobatto(2)
    np.testing.assert_allclose(r2.nodes, [-1, 1])
    np.testing.assert_allclose(r2.weights, [1, 1])
    r3 = gauss_lobatto(3)
    np.testing.assert_allclose(r3.nodes, [-1, 0, 1], atol=1e-15)
    np.testing.assert_allclose(r3.weights, [1 / 3, 4 / 3, 1 / 3], rtol=1e-14)


def test_lobatto_x12():
    r = gauss_lobatto(8)
    assert abs(r.integrate(r.nodes**12) - 2 / 13) < 1e-14


@settings(max_examples=25, deadline=None)
@given(Q=st.integers(2, 120), seed=st.integers(0, 2**31))
def test_lobatto_exactness(Q, seed):
    r = gauss_lobatto(Q)
    assert r.kind == "lobatto"
    assert r.nodes[0] == -1.0 and r.nodes[-1] == 1.0
    assert np.all(np.diff(r.nodes) > 0)
    assert np.all(r.weights > 0)
    assert r.weights.sum() == pytest.approx(2.0, rel=1e-14)
    # random Legendre series of the top exact degree; the integral is 2 * c_0
    deg = 2 * Q - 3
    c = np.random.default_rng(seed).standard_normal(deg + 1)
    approx = r.integrate(np.polynomial.legendre.legval(r.nodes, c))
    assert approx == pytest.approx(2 * c[0], abs=1e-12 * np.abs(c).sum())


def _jacobi_moment(k, a, b):
    """int_{-1}^{1} (1-x)^a (1+x)^b x^k dx via x = 2t - 1 and Beta functions."""
    total = 0.0
    for j in range(k + 1):
        total += math.comb(k, j) * 2.0**j * (-1.0) ** (k - j) * special.beta(b + j + 1, a + 1)
    return 2.0 ** (a + b + 1) * total


@pytest.mark.parametrize("Q, a, b", [(1, 0.0, 0.0), (3, -0.6, -0.6), (5, -0.9, -0.55), (6, 0.5, -0.75)])
def test_jacobi_rule_monomial_exactness(Q, a, b):
    r = gauss_jacobi(Q, a, b)
    for k in range(2 * Q):
        exact = _jacobi_moment(k, a, b)
        scale = _jacobi_moment(0, a, b)
        assert r.integrate(r.nodes**k) == pytest.approx(exact, abs=1e-12 * scale)


def test_jacobi_midpoint():
    r = gauss_jacobi(1, 0.0, 0.0)
    np.testing.assert_allclose(r.nodes, [0.0], atol=1e-16)
    np.testing.assert_allclose(r.weights, [2.0])


def test_jacobi_beta_oracle():
    r = gauss_jacobi(4, -0.75, -0.75)
    expected = 2 ** (-0.5) * special.beta(0.25, 0.25)
    assert r.weights.sum() == pytest.approx(expected, rel=1e-12)


def test_jacobi_adaptive_oracle():
    r = gauss_jacobi(5, -0.6, -0.6)
    val, _ = integrate.quad(lambda x: x * x, -1, 1, weight="alg", wvar=(-0.6, -0.6), epsabs=1e-14)
    assert r.integrate(r.nodes**2) == pytest.approx(val, abs=1e-10)


@pytest.mark.parametrize("Q", [40, 151, 400])
def test_jacobi_large_rule_accuracy(Q):
    mu = 0.75
    r = gauss_jacobi(Q, -mu, -mu)
    assert r.weights.sum() == pytest.approx(2 ** (1 - 2 * mu) * special.beta(1 - mu, 1 - mu), rel=1e-13)
    x_ref, w_ref = special.roots_jacobi(Q, -mu, -mu)
    np.testing.assert_allclose(r.nodes, x_ref, atol=1e-13)


@settings(max_examples=20, deadline=None)
@given(Q=st.integers(1, 60), a=st.floats(-0.95, 1.0))
def test_jacobi_symmetric_weight_gives_symmetric_rule(Q, a):
    r = gauss_jacobi(Q, a, a)
    np.testing.assert_allclose(r.nodes, -r.nodes[::-1], atol=1e-14)
    np.testing.assert_allclose(r.weights, r.weights[::-1], rtol=1e-12)
    assert np.all(np.diff(r.nodes) > 0) and np.all(r.weights > 0)


def test_rules_are_cached_and_read_only():
    assert gauss_lobatto(17) is gauss_lobatto(17)
    r = gauss_jacobi(9, -0.7, -0.7)
    with pytest.raises(ValueError):
        r.nodes[0] = 0.0


@pytest.mark.parametrize("call", [lambda: gauss_lobatto(1), lambda: gauss_jacobi(0, 0, 0),
                                  lambda: gauss_jacobi(3, -1.2, 0.0)])
def test_rules_reject_bad_input(call):
    with pytest.raises(ParameterError):
        call()
