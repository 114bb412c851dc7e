from fractions import Fraction

import pytest
from hypothesis import given, settings

from lambdakit import bracket as BR
from lambdakit import fields as F
from lambdakit import presentations as PR
from lambdakit.engine import NonCanonicalInput
from lambdakit.fields import NO, Gen, S, T
from lambdakit.fock import Oracle
from lambdakit.scalars import num

from conftest import states

P1 = PR.free_pairs(1)
FREE1 = PR.free_sigma_model(1)
FREE2 = PR.free_sigma_model(2)
B, Psi = Gen("B[1]"), Gen("Psi[1]")


def test_generator_brackets():
    assert BR.lambda_bracket(Psi, B, P1).central(0, 0) == num(1)
    assert BR.lambda_bracket(B, Psi, P1).central(0, 0) == num(1)
    assert not BR.lambda_bracket(S(B), S(B), P1)
    assert BR.lambda_bracket(S(Psi), B, P1).as_dict() == {"0|1": "1"}


def test_free_pair_virasoro():
    H = PR.pairs_H(P1)
    r = BR.lambda_bracket(H, H, P1)
    assert r.as_dict() == {
        "0|0": "2*T B[1]*T Psi[1] + 2*T^2 B[1]*Psi[1] + 2*S B[1]*S T Psi[1] + 2*S T B[1]*S Psi[1]",
        "0|1": "2*T B[1]*S Psi[1] - S B[1]*T Psi[1] + S T B[1]*Psi[1]",
        "1|0": "3*T B[1]*Psi[1] + 3*S B[1]*S Psi[1]",
        "2|1": "1",
    }
    # (2T + 3λ + χS) H + λ²χ c/3 with c = 3/2
    Hs = F.canonical(H, P1)
    assert r.coefficient(0, 0) == F.apply_T(H, P1) * 2
    assert r.coefficient(1, 0) == Hs * 3
    assert r.coefficient(0, 1) == F.apply_S(H, P1)
    assert r.central(2, 1) == num(1)


def test_provenance_counts_rules():
    r = BR.lambda_bracket(NO(Psi, S(B)), NO(T(Psi), B), PR.free_pairs(1))
    assert r.trace["wick"] > 0 and r.trace["generator"] > 0


def test_strict_rejects_non_canonical():
    with pytest.raises(NonCanonicalInput):
        BR.lambda_bracket(NO(Psi, B), B, P1, strict=True)
    st = F.canonical(NO(B, Psi), P1)
    psi = F.canonical(Psi, P1)
    assert BR.lambda_bracket(st, psi, P1, strict=True) == BR.lambda_bracket(NO(B, Psi), Psi, P1)


def test_bracket_difference():
    r = BR.lambda_bracket(Psi, B, P1)
    assert not BR.bracket_difference(r, {(0, 0): {(): num(1)}})


def test_monomial_counts():
    assert [len(BR.monomials(FREE1, Fraction(k, 2))) for k in range(5)] == [0, 4, 14, 38, 93]
    assert len(BR.monomials(FREE2, 2)) == 574


@given(states(FREE1, 2), states(FREE1, 2))
def test_skew_symmetry_free1(a, b):
    assert not BR.verify_skew(a, b, FREE1)


@settings(max_examples=15)
@given(states(FREE2, 2), states(FREE2, 2))
def test_skew_symmetry_free2(a, b):
    assert not BR.verify_skew(a, b, FREE2)


@settings(max_examples=25)
@given(states(FREE1, Fraction(3, 2)), states(FREE1, Fraction(3, 2)), states(FREE1, Fraction(3, 2)))
def test_jacobi_free1(a, b, c):
    assert not BR.verify_jacobi(a, b, c, FREE1)


@settings(max_examples=10)
@given(states(FREE2, 1), states(FREE2, 1), states(FREE2, 1))
def test_jacobi_free2(a, b, c):
    assert not BR.verify_jacobi(a, b, c, FREE2)


ORC1 = Oracle(FREE1)


@settings(max_examples=15)
@given(states(FREE1, 1), states(FREE1, 1), states(FREE1, 1))
def test_quasi_associativity_matches_oracle(a, b, c):
    assert not BR.verify_quasi_associativity(a.to_expr(), b.to_expr(), c.to_expr(), FREE1, ORC1)


def test_jacobi_detects_broken_table():
    # a presentation whose generator table violates Jacobi
    from lambdakit.presentation import Presentation
    P = Presentation("broken")
    P.add_gen("a", 1, weight=Fraction(1, 2))
    P.add_gen("b", 1, weight=Fraction(1, 2))
    P.set_bracket("a", "a", Gen("b"))
    P.set_bracket("a", "b", 1)
    P.set_bracket("b", "b", 0)
    a = Gen("a")
    assert BR.verify_jacobi(a, a, a, P)
