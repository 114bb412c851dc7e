from fractions import Fraction

import pytest
from hypothesis import given, settings

from lambdakit import bracket as BR
from lambdakit import fock
from lambdakit import presentations as PR
from lambdakit.fields import NO, Gen, S, T
from lambdakit.scalars import num

from conftest import states

FREE1 = PR.free_sigma_model(1)
B, Psi = Gen("B[1]"), Gen("Psi[1]")


def test_basis_sizes():
    assert [len(fock.build_fock(1, Fraction(k, 2))) for k in range(6)] == [1, 3, 6, 12, 23, 41]


def test_basis_weights_sorted():
    b = fock.build_fock(1, 2)
    ws = [b.weight(i) for i in range(len(b))]
    assert ws == sorted(ws) and ws[0] == 0 and ws[-1] == 2


def test_bad_cutoff():
    with pytest.raises(ValueError):
        fock.build_fock(1, Fraction(1, 3))


def test_budget(monkeypatch):
    monkeypatch.setenv(fock.BUDGET_ENV, "5")
    with pytest.raises(fock.ResourceError):
        fock.build_fock(1, 2)


def test_component_commutators():
    sys = fock.FreeFieldSystem(PR.free_pairs(1))
    assert sys.names == ["B[1]|", "SB[1]|", "Psi[1]|", "SPsi[1]|"]
    # [SPsi_(m), B_(n)] = δ_{m+n+1,0} and [Psi_(m), SB_(n)] = δ_{m+n+1,0}
    assert sys.commutator(3, 0, 0, -1) == num(1)
    assert sys.commutator(3, 1, 0, -1) == num(0)
    assert sys.commutator(2, 0, 1, -1) == num(1)
    assert sys.commutator(0, -1, 3, 0) == num(-1)


def test_operator_dump_format():
    P, named = PR.flat_free_fields(1)
    basis = fock.build_fock(P, 1)
    op = fock.field_to_operator(named["H+"], (0, 1), basis)
    lines = op.dump().splitlines()
    assert len(lines) == op.nnz() > 0
    r, c, re, im = lines[0].split()
    assert int(r) < len(basis) and Fraction(re) or Fraction(im)


def test_strict_overflow():
    basis = fock.build_fock(PR.free_pairs(1), 1)
    with pytest.raises(fock.WeightOverflow):
        fock.field_to_operator(T(Psi), (0, 0), basis, strict=True)


def test_supercommutator_of_free_modes():
    P = PR.free_pairs(1)
    basis = fock.build_fock(P, 2)
    # Psi_(0) and SB_(-1) are canonically conjugate: their anticommutator is 1
    a = fock.field_to_operator(Psi, (0, 1), basis)
    b = fock.field_to_operator(S(B), (-1, 1), basis)
    c = a.supercommutator(b)
    low = {k: v for k, v in c.entries.items() if basis.weight(k[1]) <= Fraction(3, 2)}
    assert len(low) == sum(1 for i in range(len(basis)) if basis.weight(i) <= Fraction(3, 2))
    assert all(r == col and v == num(1) for (r, col), v in low.items())


@pytest.mark.parametrize("a,b", [(Psi, B), (S(B), S(Psi)), (NO(Psi, S(B)), NO(T(Psi), B)),
                                 (NO(S(B), Psi), NO(S(B), Psi))])
def test_engine_matches_oracle_examples(a, b):
    P = PR.free_pairs(1)
    ok, diffs = fock.compare_with_engine(a, b, P)
    assert ok, diffs


ORC = fock.Oracle(FREE1)


@settings(max_examples=30)
@given(states(FREE1, Fraction(3, 2)), states(FREE1, Fraction(3, 2)))
def test_engine_matches_oracle_property(a, b):
    ok, diffs = fock.compare_with_engine(a.to_expr(), b.to_expr(), FREE1, ORC)
    assert ok, diffs


def test_cutoff_oracle_records_beyond():
    orc = fock.Oracle(FREE1, cutoff=Fraction(5, 2))
    a = BR.monomial_state(FREE1, BR.monomials(FREE1, 2)[-1]).to_expr()
    ok, _ = fock.compare_with_engine(a, a, FREE1, orc)
    assert ok and orc.beyond


def test_oracle_detects_wrong_bracket():
    P = PR.free_pairs(1)
    eng = P.engine()
    lp = eng.bracket_states(eng.canon(Psi), eng.canon(B))
    lp[(0, 0)] = {(): num(2)}
    orc = fock.Oracle(P)
    assert orc.engine_table_states(lp) != orc.commutator_structure(Psi, B)
