import random

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from lambdakit import geometry as G

X4 = list(sp.symbols("x1:5", real=True))
CLOSED = {(0, 2, 3): X4[1], (1, 2, 3): X4[0]}
NONCLOSED = {(0, 1, 2): X4[3]}


def test_forms_basics():
    x, y = sp.symbols("x y")
    dx, dy = G.one_form([1, 0]), G.one_form([0, 1])
    assert G.wedge(dx, dy) == {(0, 1): 1}
    assert G.wedge(dy, dx) == {(0, 1): -1}
    assert not G.wedge(dx, dx)
    f = {(): x * y ** 2}
    assert not G.ext_d(G.ext_d(f, [x, y]), [x, y])
    assert G.interior([1, 0], G.wedge(dx, dy)) == {(1,): 1}


def test_vector_bracket_and_lie():
    x, y = sp.symbols("x y")
    X, Y = [y, 0], [0, x]
    assert G.vec_bracket(X, Y, [x, y]) == [-x, y]
    # Cartan: Lie_X = i_X d + d i_X on 1-forms
    a = G.one_form([x * y, x ** 2])
    lhs = G.lie_form(X, a, [x, y])
    rhs = G.form_add(G.interior(X, G.ext_d(a, [x, y])), G.ext_d(G.interior(X, a), [x, y]))
    assert G._clean(G.form_add(lhs, rhs, coeffs=[1, -1])) == {}


def test_parse_three_form():
    H = G.parse_three_form("1 3 4 : x2\n2 3 4 : x1\n3 1 4 : 1  # sign flips\n", X4)
    assert H == {(0, 2, 3): X4[1] - 1, (1, 2, 3): X4[0]}
    assert G.three_form_closed(CLOSED, X4)
    assert not G.three_form_closed(NONCLOSED, X4)
    with pytest.raises(ValueError):
        G.parse_three_form("1 2 : x1", X4)


@pytest.mark.parametrize("H", [{}, CLOSED], ids=["H=0", "closed"])
def test_courant_axioms(H):
    fails = G.courant_axioms_check(H, X4, trials=4, seed=3)
    assert fails == dict.fromkeys(fails, 0)


def test_courant_nonclosed_detected():
    fails = G.courant_axioms_check(NONCLOSED, X4, trials=4, seed=3)
    assert fails["leibniz"] > 0
    assert all(v == 0 for k, v in fails.items() if k != "leibniz")


@settings(max_examples=8)
@given(st.integers(0, 10 ** 6))
def test_courant_axioms_property(seed):
    x = list(sp.symbols("x1:4", real=True))
    H = {(0, 1, 2): sp.Integer(seed % 5)}
    fails = G.courant_axioms_check(H, x, trials=1, seed=seed)
    assert not any(fails.values())


@settings(max_examples=20)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3, 4]))
def test_pairing_symmetric(seed, m):
    x = list(sp.symbols("x1:%d" % (m + 1)))
    rng = random.Random(seed)
    A, B = G.random_section(x, rng), G.random_section(x, rng)
    assert not G._nz(G.pairing(A, B) - G.pairing(B, A))


@pytest.mark.parametrize("m", [2, 3, 4])
def test_clifford_and_mukai_identities(m):
    fails = G.clifford_identities(m, trials=10, seed=m)
    assert fails == dict.fromkeys(fails, 0)


@pytest.mark.parametrize("n,c", [(1, -1), (2, 1), (3, -1)])
def test_mukai_sign(n, c):
    got, want = G.mukai_sign_check(n)
    assert got == want == c


def test_bihermitian_to_gcs():
    J = G.standard_J(2)
    g = sp.diag(2, 2, 3, 3)
    Jm = sp.Matrix([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]])
    for Jp, Jq in ((J, J), (J, -J), (J, Jm)):
        rep = G.bihermitian_to_GCS(g, Jp, Jq)[3]
        assert all(rep.values()), rep


def test_omega_sign():
    # J ∂x = ∂y gives ω = g J = −dx∧dy
    J = G.standard_J(1)
    assert J * sp.Matrix([1, 0]) == sp.Matrix([0, 1])
    assert G.two_form(G.omega_of(sp.eye(2), J)) == {(0, 1): -1}


def test_flat_cy_checks():
    rep = G.flat_cy_checks(1)
    assert all(rep["frames+"].values()) and all(rep["frames-"].values())
    for k in ("structure functions zero", "dilaton constant", "modular zero", "v + 2dPhi",
              "Poisson divergence", "omega inverse divergence"):
        assert rep[k] is True, k


def test_frames_conformal_metric():
    ch = G.flat_chart(1)
    g = sp.exp(ch.x[0] * ch.x[1]) * sp.eye(2)
    for s in (1, -1):
        assert all(G.frame_report(g, ch, G.standard_J(1), {}, s).values())


def test_modular_class_matches_chi():
    assert G.modular_chi_check() == [0, 0]
    x, y = G.flat_chart(1).x
    assert G.modular_chi_check(sp.Integer(3) * x - y ** 2) == [0, 0]


def test_divergence_conventions():
    x, y = sp.symbols("x y")
    mu = sp.exp(x)
    # div_μ(∂_x) = −(1/μ)∂_x μ = −1
    assert sp.simplify(G.div_mu(G.vector([1, 0]), mu, [x, y]) + 1) == 0


def test_trace_identities_close_and_control_fails():
    pack = G.TraceIdentityPack()
    assert all(pack.check("lie").values())
    assert not any(pack.check("local").values())
    assert all(G.TraceIdentityPack("+").check().values())


def test_algebroid_differential_flat_vanishes():
    assert G.algebroid_differential_flat(1) == {(0, 0): 0, (0, 1): 0, (1, 0): 0, (1, 1): 0}
