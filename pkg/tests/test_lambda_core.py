from fractions import Fraction

from hypothesis import given, strategies as st

from lambdakit.lambda_core import (GAM, LAM, HPoly, LambdaVar, hpoly_mul, integrate_gamma,
                                   mode_extract, reassemble, render_hpoly, substitute_skew)
from lambdakit.scalars import ONE, num, q

exps = st.tuples(st.integers(0, 3), st.integers(0, 1))
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4).map(num)


@st.composite
def hpolys(draw, vars=(LAM,)):
    terms = draw(st.dictionaries(st.tuples(*[exps] * len(vars)), coeffs, max_size=4))
    return HPoly(vars, terms)


def test_chi_squared_is_minus_lambda():
    chi = HPoly.monomial((0, 1))
    lam = HPoly.monomial((1, 0))
    assert hpoly_mul(chi, chi) == -lam


def test_monomial_normalizes_high_odd_degree():
    assert HPoly.monomial((0, 3)) == -HPoly.monomial((1, 1))
    assert HPoly.monomial((1, 4)) == HPoly.monomial((3, 0))


def test_odd_variables_anticommute():
    chi = HPoly.monomial(((0, 1), (0, 0)), vars=(LAM, GAM))
    eta = HPoly.monomial(((0, 0), (0, 1)), vars=(LAM, GAM))
    assert hpoly_mul(chi, eta) == -hpoly_mul(eta, chi)


def test_odd_coefficient_sign():
    # chi * (c) with c odd: c passes chi
    chi = HPoly.monomial((0, 1))
    c = HPoly.constant(num(1))
    left = hpoly_mul(c, chi, parity=lambda x: 1)
    assert left == -chi


@given(hpolys(), hpolys(), hpolys())
def test_product_associative(a, b, c):
    assert hpoly_mul(hpoly_mul(a, b), c) == hpoly_mul(a, hpoly_mul(b, c))


@given(hpolys(), hpolys())
def test_product_commutative_for_even_coefficients(a, b):
    # χ's anticommute with each other only, and χ·χ = −λ is symmetric in this sense
    even = lambda p: HPoly(p.vars, {k: c for k, c in p.terms.items() if k[0][1] == 0})
    assert hpoly_mul(even(a), b) == hpoly_mul(b, even(a))


@given(hpolys(), hpolys(), hpolys())
def test_distributive(a, b, c):
    assert hpoly_mul(a, b + c) == hpoly_mul(a, b) + hpoly_mul(a, c)


@given(hpolys())
def test_mode_roundtrip(p):
    modes = {k[0]: mode_extract(p, *k[0]) for k in p.terms}
    assert reassemble(modes) == p


def test_mode_extract_factorial():
    p = HPoly.monomial((3, 1), c=num(2))
    assert mode_extract(p, 3, 1) == num(12)
    assert mode_extract(p, 0, 0) == num(0)


def test_integrate_gamma_examples():
    # ∫_0^Λ η dΓ = λ ; ∫_0^Λ γ dΓ = 0 ; ∫_0^Λ γ η dΓ = λ^2 / 2
    assert integrate_gamma(HPoly.monomial(((0, 0), (0, 1)), vars=(LAM, GAM)), GAM, LAM) == HPoly.monomial((1, 0))
    assert not integrate_gamma(HPoly.monomial(((0, 0), (1, 0)), vars=(LAM, GAM)), GAM, LAM)
    got = integrate_gamma(HPoly.monomial(((0, 0), (1, 1)), vars=(LAM, GAM)), GAM, LAM)
    assert got == HPoly.monomial((2, 0), c=q(1, 2))


def test_integrate_gamma_sign_past_chi():
    p = HPoly.monomial(((0, 1), (0, 1)), vars=(LAM, GAM))
    assert integrate_gamma(p, GAM, LAM) == HPoly.monomial((1, 1), c=num(-1))


def test_substitute_skew_scalar_coefficients():
    # S and T kill constants: Γ -> (-λ, -χ)
    zero = lambda c: num(0)
    p = HPoly((GAM,), {((2, 1),): num(3)})
    assert substitute_skew(p, GAM, LAM, zero, zero) == HPoly((LAM,), {((2, 1),): num(-3)})


def test_render_and_fresh_vars():
    assert render_hpoly(HPoly.monomial((2, 1), c=num(5))) == "lam^2*chi*(5)"
    assert render_hpoly(HPoly((LAM,))) == "0"
    a, b = LambdaVar.fresh(), LambdaVar.fresh()
    assert a != b and a == a


def test_variable_mismatch():
    import pytest
    with pytest.raises(ValueError):
        HPoly((LAM,)) + HPoly((GAM,))
    assert ONE == num(Fraction(1))
