from fractions import Fraction

import pytest

from lambdakit import bracket as BR
from lambdakit import fields as F
from lambdakit import presentations as PR
from lambdakit.fields import Gen
from lambdakit.presentation import Presentation
from lambdakit.scalars import num


@pytest.mark.parametrize("n", [1, 2])
def test_two_commuting_n2_flat(n):
    P = PR.flat_patch(n)
    rep = PR.verify_n22(PR.named_fields(P), P)
    assert PR.n22_passed(rep)
    assert len(rep["residuals"]) == 12
    assert all(not v for v in rep["residuals"].values())
    assert rep["central"] == {"+": num(n), "-": num(n)}


def test_two_commuting_n2_free_realization():
    P, named = PR.flat_free_fields(1)
    rep = PR.verify_n22(named, P)
    assert PR.n22_passed(rep) and rep["central"] == {"+": num(1), "-": num(1)}


@pytest.mark.parametrize("n", [1, 2])
def test_diagonal_n2(n):
    P = PR.flat_patch(n)
    named = PR.named_fields(P)
    for J in ("J1", "J2"):
        rep = PR.verify_single_n2(named[J], named["H"], P, 6 * n)
        assert PR.n22_passed(rep)
        assert rep["central"] == {"": num(2 * n)}


def test_diagonal_current_bracket(flat1):
    P, named = flat1
    r = BR.lambda_bracket(named["J1"], named["J1"], P)
    total = BR.bracket_difference(r, {(0, 0): dict(F.canonical(F.CoeffMul(num(-1), named["H"]), P).terms),
                                     (1, 1): {(): num(-2)}})
    assert not total
    assert r.central(1, 1) == num(-2)


def test_wrong_central_charge_is_detected(flat1):
    P, named = flat1
    assert not PR.n22_passed(PR.verify_single_n2(named["J1"], named["H"], P, 3))


def test_sectors_commute(flat1):
    P, named = flat1
    for a in ("J+", "H+"):
        for b in ("J-", "H-"):
            assert not BR.lambda_bracket(named[a], named[b], P)


def test_eta_patch_shift():
    assert PR.eta_shift_check(1) == {"frames": {}, "JD": {}}


def test_constant_structure_pack():
    pack = PR.trace_relation_pack(1)
    from lambdakit.scalars import render_coeff
    assert {k: render_coeff(v) for k, v in pack.items()} == {"d^{11}_1": "eta+^{,1-}"}
    P = PR.constant_structure_patch(1)
    assert isinstance(P, Presentation)


def test_presentation_errors():
    P = Presentation("t")
    P.add_gen("a", 0, weight=0)
    with pytest.raises(Exception):
        P.add_gen("a", 1)
    with pytest.raises(Exception):
        P.parity("nope")


def test_free_models_shape():
    P = PR.free_sigma_model(2)
    assert P.gen_names[:4] == ["B[1]", "B[2]", "B[1b]", "B[2b]"]
    assert P.weight("Psi[1b]") == Fraction(1, 2)
    with pytest.raises(ValueError):
        PR.free_sigma_model(0)
    assert BR.lambda_bracket(Gen("Psi[2b]"), Gen("B[2b]"), P).central(0, 0) == num(1)
    assert not BR.lambda_bracket(Gen("Psi[1]"), Gen("B[2]"), P)
