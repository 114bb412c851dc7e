import pytest

from lambdakit import bracket as BR
from lambdakit import twist as TW


@pytest.fixture(scope="module")
def tm1():
    return TW.TwistModule(1, cutoff=1)


@pytest.fixture(scope="module")
def tm2():
    return TW.TwistModule(1, cutoff=2)


def test_basis_size(tm1, tm2):
    # built half a unit above the cutoff so products of weight-raising modes are exact
    assert (len(tm1.basis), len(tm2.basis)) == (39, 210)


@pytest.mark.parametrize("which", ["tm1", "tm2"])
def test_brst_relations_vanish(which, request):
    res = TW.brst_check(request.getfixturevalue(which))
    assert len(res) == 22
    assert res == dict.fromkeys(res, 0)


def test_negative_control(tm2):
    assert TW.negative_control(tm2) > 0


def test_printed_G_form_fails(tm2):
    diag = TW.printed_G_diagnostic(tm2)
    assert diag == {"[G0+,Q0+]-L0+": 350, "[L0+,G0+]": 196, "[G0-,Q0-]-L0-": 350, "[L0-,G0-]": 196}


def test_zero_modes_engine_matches_fock(tm1):
    orc, P = tm1.oracle, tm1.P
    for m in BR.monomials(P, 1):
        st = BR.monomial_state(P, m).to_expr()
        vec = {tm1.basis.index[k]: c for k, c in orc.state(st).items()}
        for lab in TW.LABELS:
            for s in "+-":
                lhs = orc.state(TW.engine_zero_mode(lab, s, tm1.named, P, st).to_expr())
                out = {}
                for (r, c), x in tm1.ops[lab + s].entries.items():
                    if c in vec:
                        out[r] = out.get(r, 0) + x * vec[c]
                assert lhs == {tm1.basis.states[r]: x for r, x in out.items() if x}, (lab, s, m)


def test_charges_integral(tm1):
    cells = TW.charge_cells(tm1)
    low = sum(1 for i in range(len(tm1.basis)) if tm1.basis.weight(i) <= 1)
    assert sum(len(v) for v in cells.values()) == low == 15
    assert all(isinstance(q, int) for (_, qm, qp) in cells for q in (qm, qp))


def test_cohomology_weight_zero_matches_hand_count(tm2):
    rows = TW.cohomology_table(tm2, "Q+", 0)
    got = {r["degree"]: r["dim_H"] for r in rows}
    hand = TW.hand_weight_zero_cell(1)
    by_deg = {}
    for (qm, qp), d in hand.items():
        by_deg[qp] = by_deg.get(qp, 0) + d
    assert got == by_deg == {0: 2, 1: 2}


@pytest.mark.parametrize("diff", ["Q-", "QB", "QA"])
def test_other_differentials_square_to_zero(tm2, diff):
    D, _ = TW.differential(tm2, diff)
    assert (tm2.low(D @ D)).nnz() == 0
    rows = TW.cohomology_table(tm2, diff, 0)
    assert all(r["dim_H"] >= 0 for r in rows)


def test_weight_guard():
    with pytest.raises(ValueError):
        TW.brst_cohomology("Q+", 2, cutoff=2)


def test_missing_fields():
    with pytest.raises(KeyError):
        TW.zero_modes({"J+": None})
