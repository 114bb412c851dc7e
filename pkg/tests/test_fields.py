import pytest
from hypothesis import given

from lambdakit import fields as F
from lambdakit.fields import NO, CoeffMul, Gen, S, Sum, T, Vac
from lambdakit import presentations as PR
from lambdakit.scalars import num

from conftest import states

P1 = PR.free_pairs(1)
FREE1 = PR.free_sigma_model(1)
B, Psi = Gen("B[1]"), Gen("Psi[1]")


def render(e, P=P1):
    return F.canonical(e, P).render()


def test_canonical_examples():
    assert render(NO(Psi, S(B))) == "-S B[1]*Psi[1]"
    assert render(NO(S(B), Psi)) == "S B[1]*Psi[1]"
    assert render(NO(Psi, Psi)) == "0"
    assert render(NO(T(Psi), Psi)) == "-Psi[1]*T Psi[1]"
    assert render(Vac()) == "1"
    assert render(Sum((B, CoeffMul(num(-1), B)))) == "0"


def test_S_squared_is_T():
    for e in (B, Psi, NO(B, S(Psi)), NO(S(B), NO(Psi, T(B)))):
        assert F.apply_S(S(e), P1) == F.apply_T(e, P1)


def test_translation_is_derivation():
    assert F.apply_T(NO(B, B), P1).render() == "2*B[1]*T B[1]"
    assert F.apply_S(S(B), P1).render() == "T B[1]"


def test_S_odd_derivation():
    # S(Psi B) = (S Psi) B - Psi (S B)
    lhs = F.apply_S(NO(Psi, B), P1)
    rhs = F.canonical(NO(S(Psi), B), P1) - F.canonical(NO(Psi, S(B)), P1)
    assert lhs == rhs


def test_parity_and_weight():
    assert F.parity(NO(Psi, S(B)), P1) == 0
    assert F.parity(S(B), P1) == 1
    assert F.weight(NO(Psi, T(S(B))), P1) == 2
    with pytest.raises(ValueError):
        F.parity(Sum((B, Psi)), P1)


def test_reassociate_example():
    assert F.reassociate(NO(NO(Psi, S(B)), T(B)), P1).render() == "-T B[1]*S B[1]*Psi[1]"


def test_state_roundtrip_to_expr():
    st = F.canonical(NO(S(B), Psi) + 3 * NO(T(B), B), P1)
    assert F.canonical(st.to_expr(), P1) == st


def test_substitute():
    e = F.substitute(NO(Gen("X"), S(Gen("Y"))), {"X": B, "Y": Psi})
    assert e == NO(B, S(Psi))


@given(states(FREE1, 1), states(FREE1, 1))
def test_canonical_idempotent_and_linear(a, b):
    ea, eb = a.to_expr(), b.to_expr()
    assert F.canonical(F.canonical(ea, FREE1).to_expr(), FREE1) == F.canonical(ea, FREE1)
    assert F.canonical(Sum((ea, eb)), FREE1) == a + b


@given(states(FREE1, 1))
def test_S_squared_property(a):
    e = a.to_expr()
    assert F.apply_S(S(e), FREE1) == F.apply_T(e, FREE1)


@given(states(FREE1, 1, parity=0), states(FREE1, 1, parity=0), states(FREE1, 1, parity=0))
def test_normal_order_bilinear(a, b, c):
    lhs = F.normal_order(Sum((a.to_expr(), b.to_expr())), c.to_expr(), FREE1)
    rhs = F.normal_order(a.to_expr(), c.to_expr(), FREE1) + F.normal_order(b.to_expr(), c.to_expr(), FREE1)
    assert lhs == rhs
