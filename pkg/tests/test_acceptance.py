"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest -v tests/test_acceptance.py`` or directly with
``python tests/test_acceptance.py``.
"""
import sys
import time
from fractions import Fraction

import pytest

from lambdakit import bracket as BR
from lambdakit import commands as C
from lambdakit import fields as F
from lambdakit import geometry as G
from lambdakit import presentations as PR
from lambdakit.scalars import num

RESULTS = {}


def _line(n, title, ok, detail=""):
    RESULTS[n] = ok
    return "[%s] criterion %d: %s%s" % ("PASS" if ok else "FAIL", n, title, " (%s)" % detail if detail else "")


@pytest.fixture
def report(capsys):
    def emit(*args):
        line = _line(*args)
        with capsys.disabled():
            print("\n" + line)
        return args[2]
    return emit


def _failed(rep):
    return [c["name"] for c in rep.as_dict()["checks"] if c["status"] != "pass"]


def criterion_1():
    t = time.time()
    rep = C.verify_n22()
    dt = time.time() - t
    central = {c["name"]: c["detail"]["value"] for c in rep.as_dict()["checks"] if c["name"].startswith("central")}
    families = [c for c in rep.as_dict()["checks"] if not c["name"].startswith("central")]
    ok = rep.passed and len(families) == 12 and set(central.values()) == {"1"} and len(central) == 2 and dt < 60
    return ok, "12 families zero, c/3 = %s in both sectors, %.2f s" % (",".join(sorted(set(central.values()))), dt)


def criterion_2():
    P = PR.flat_patch(1)
    named = PR.named_fields(P)
    r = BR.lambda_bracket(named["J1"], named["J1"], P)
    dim_M = 2
    H = F.canonical(named["H"], P)
    total = BR.bracket_difference(r, {(0, 0): dict((-H).terms), (1, 1): {(): num(-dim_M)}})
    lam_chi = -r.central(1, 1)
    ok = not total and lam_chi == num(dim_M)
    return ok, "[J1_Λ J1] + H + %sλχ = %s" % (lam_chi, total.render() if total else "0")


def criterion_3():
    rep = C.verify_axioms(trials=200, seed=0, models=(1, 2))
    ok = rep.passed and len(rep.checks) == 6
    return ok, "200 skew, 200 Jacobi, 50 quasi-associativity per model, n = 1, 2" if ok \
        else "failed: %s" % _failed(rep)


def criterion_4():
    rep = C.oracle_compare(n=1, max_weight=2, cutoff=Fraction(5, 2), stability_cutoff=Fraction(7, 2),
                           untruncated=True)
    pairs = rep.info.get("pairs")
    return rep.passed, "%s pairs, cutoff 5/2, central stable to 7/2" % pairs if rep.passed \
        else "failed: %s" % _failed(rep)


def criterion_5():
    chk = C.twist_check(cutoff=2)
    coh = C.twist_cohomology(weight=0, diff="Q+", cutoff=2, stability=True)
    ok = chk.passed and coh.passed
    table = {r["degree"]: r["dim_H"] for r in coh.info["table"]}
    return ok, "%d matrix checks at cutoff 2 incl. control; H(Q0+) at weight 0 = %s" % (len(chk.checks), table) if ok \
        else "failed: %s" % (_failed(chk) + _failed(coh))


def criterion_6():
    reps = [C.check_courant(None, dim=4, trials=50),
            C.check_courant(C.bundled("closed3form.txt"), trials=50),
            C.check_courant(C.bundled("nonclosed3form.txt"), trials=50),
            C.geometry_mukai(), C.geometry_modular(), C.geometry_frames(), C.geometry_dilaton()]
    ok = all(r.passed for r in reps)
    # the nonclosed run only passes if its Leibniz failures were detected
    detected = any("detects" in c["name"] for c in reps[2].as_dict()["checks"])
    c2, want = G.mukai_sign_check(1)
    ok = ok and detected and c2 == want == -1
    n = sum(len(r.checks) for r in reps)
    return ok, "%d checks; m = 2 sign c = %s" % (n, c2) if ok else \
        "failed: %s" % [f for r in reps for f in _failed(r)]


def criterion_7():
    closes = G.TraceIdentityPack().check("lie")
    control = G.TraceIdentityPack().check("local")
    ok = all(closes.values()) and not any(control.values())
    return ok, "%d identities reduce to zero; sign-flipped control fails" % len(closes)


CRITERIA = [
    (1, "two commuting N=2 structures on the flat n=1 model", criterion_1),
    (2, "diagonal N=2 current bracket", criterion_2),
    (3, "skew-symmetry, Jacobi and quasi-associativity on random inputs", criterion_3),
    (4, "engine brackets equal Fock-oracle commutators", criterion_4),
    (5, "twisted zero modes and Q0+ cohomology", criterion_5),
    (6, "Courant, Clifford/Mukai and flat-model geometry", criterion_6),
    (7, "structure-function trace identities", criterion_7),
]


@pytest.mark.parametrize("n,title,fn", CRITERIA, ids=["criterion_%d" % c[0] for c in CRITERIA])
def test_criterion(n, title, fn, report):
    ok, detail = fn()
    assert report(n, title, ok, detail)


if __name__ == "__main__":
    bad = 0
    for n, title, fn in CRITERIA:
        ok, detail = fn()
        print(_line(n, title, ok, detail))
        bad += not ok
    sys.exit(1 if bad else 0)
