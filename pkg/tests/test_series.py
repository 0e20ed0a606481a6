import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from halfheat import series
from halfheat.series import ExactPoly, Jet, JetDomainError, jet1, poly_vars

small = st.floats(-2, 2, allow_nan=False)


def test_derivative_of_quadratic():
    d = jet1([1.0, 1.0, 1.0]).diff()
    assert list(d.coeffs) == [1.0, 2.0]


def test_product_of_linear_factors():
    u = Jet.variable(0, 2, 2)
    v = Jet.variable(1, 2, 2)
    p = (1 + u) * (1 + v)
    assert p.terms() == {(0, 0): 1, (1, 0): 1, (0, 1): 1, (2, 0): 0, (1, 1): 1, (0, 2): 0}


def test_geometric_series():
    rho = Jet.variable(0, 1, 3)
    assert np.allclose((1 / (1 - rho)).coeffs, [1, 1, 1, 1])


def test_exact_geometric_series():
    rho = Jet.variable(0, 1, 4, exact=True)
    assert list((1 / (1 - rho)).coeffs) == [Fraction(1)] * 5


def test_compose_identity():
    j = jet1([0.7, 0.2, -1.0, 0.5])
    out = series.compose_analytic(j, 0.7, [0.7, 1.0, 0.0, 0.0])
    assert np.allclose(out.coeffs, j.coeffs)


def test_cube_root_binomial():
    u = Jet.variable(0, 1, 2, value=1.0)
    got = series.power(u, 1 / 3)
    assert np.allclose(got.coeffs, [1, 1 / 3, -1 / 9])


def test_exact_cube_root_binomial():
    u = Jet.variable(0, 1, 2, value=Fraction(1), exact=True)
    third = Fraction(1, 3)
    derivs = [Fraction(1), third, third * (third - 1)]
    assert list(series.compose_analytic(u, 1, derivs).coeffs) == [1, Fraction(1, 3), Fraction(-1, 9)]


def test_differentiating_order_zero_fails():
    with pytest.raises(JetDomainError):
        Jet.constant(1.0, 1, 0).diff()


def test_reciprocal_of_zero_constant_fails():
    with pytest.raises(JetDomainError):
        Jet.variable(0, 1, 3).reciprocal()


def test_log_domain():
    with pytest.raises(JetDomainError):
        series.log(Jet.variable(0, 1, 2, value=-1.0))


def test_order_limit():
    with pytest.raises(ValueError):
        Jet.constant(1.0, 1, series.MAX_ORDER + 2)


@given(x0=small, y0=small)
def test_sin_cos_pythagoras(x0, y0):
    x = Jet.variable(0, 2, 5, x0) + 0.3 * Jet.variable(1, 2, 5, y0)
    one = series.sin(x) ** 2 + series.cos(x) ** 2
    assert abs(one.const - 1) < 1e-12
    assert np.max(np.abs(one.coeffs[1:])) < 1e-11


@given(x0=st.floats(0.2, 3))
def test_exp_log_inverse(x0):
    x = Jet.variable(0, 1, 6, x0)
    assert np.allclose(series.exp(series.log(x)).coeffs, x.coeffs, atol=1e-11)


@given(st.lists(small, min_size=5, max_size=5), st.lists(small, min_size=5, max_size=5))
def test_product_matches_numpy_convolution(a, b):
    ja, jb = jet1(a), jet1(b)
    want = np.convolve(a, b)[:5]
    assert np.allclose((ja * jb).coeffs, want, atol=1e-12)


@given(st.lists(small, min_size=6, max_size=6))
def test_integrate_then_differentiate(c):
    j = jet1(c)
    assert np.allclose(j.integrate().diff().coeffs, j.coeffs)


@given(c1=st.floats(0.5, 2), c2=small, c3=small)
def test_revert_composes_to_identity(c1, c2, c3):
    j = jet1([0.0, c1, c2, c3])
    back = series.compose_poly(j, series.revert(j))
    assert np.allclose(back.coeffs, [0, 1, 0, 0], atol=1e-10)


def test_truncated_taylor_of_arctanh():
    x = Jet.variable(0, 1, 5, 0.0)
    assert np.allclose(series.arctanh(x).coeffs, [0, 1, 0, 1 / 3, 0, 1 / 5])


def test_restrict_and_embed():
    j = Jet.from_dict({(1, 0): 2.0, (1, 1): 3.0, (0, 2): 5.0}, 2, 3)
    r = j.restrict({0: 1})
    assert r.nvars == 1 and np.allclose(r.coeffs, [2.0, 3.0, 0.0])
    e = jet1([1.0, 2.0]).embed(3, (2,))
    assert e[(0, 0, 1)] == 2.0


def test_polynomial_arithmetic():
    a1, b1, G1, G2 = poly_vars("a1", "b1", "G1", "G2")
    assert (a1 + b1) ** 2 == a1 ** 2 + 2 * a1 * b1 + b1 ** 2
    assert ((G2 - 2 * G1) * a1 * b1).substitute({"a1": 0}).is_zero()
    p = 3 * a1 ** 2 * b1 - Fraction(1, 2) * G1
    assert p.coefficient_of({"a1": 2, "b1": 1}) == 3
    assert p.evaluate({"a1": Fraction(1, 3), "b1": 2, "G1": 4}) == Fraction(2, 3) - 2


@given(st.fractions(max_denominator=20), st.fractions(max_denominator=20))
def test_exact_poly_evaluation_matches_float(x, y):
    a1, b1 = poly_vars("a1", "b1")
    p = (a1 - 2 * b1) ** 3 + a1 * b1 / 7
    exact = p.evaluate({"a1": x, "b1": y})
    assert isinstance(exact, Fraction)
    assert float(exact) == pytest.approx(p.evaluate({"a1": float(x), "b1": float(y)}), rel=1e-12, abs=1e-10)


def test_exact_and_float_jets_agree():
    e = Jet.variable(0, 2, 4, value=Fraction(1, 2), exact=True)
    f = Jet.variable(0, 2, 4, value=0.5)
    ee = (e * e + 3) * (e - Fraction(1, 3))
    ff = (f * f + 3) * (f - 1 / 3)
    assert np.allclose([float(x) for x in ee.coeffs], ff.coeffs)


def test_jet_evaluation_is_taylor_polynomial():
    x = Jet.variable(0, 1, 8, 0.0)
    assert series.exp(x)(0.1) == pytest.approx(math.exp(0.1), rel=1e-12)
