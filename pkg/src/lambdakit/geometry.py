"""Coordinate-patch generalized geometry on T + T* (complexified).

Functions are sympy expressions in real coordinates.  Forms and spinors
are dicts ``{sorted index tuple: expr}``; a section of E is a pair
``(X, xi)`` of component lists.  Pairing and Dorfman bracket follow

    <X + ζ, Y + η> = ½(i_X η + i_Y ζ)
    [X + ζ, Y + η] = [X, Y] + Lie_X η − i_Y dζ + i_Y i_X H.
"""
import random
from dataclasses import dataclass, field
from itertools import combinations

import sympy as sp


# ---------------------------------------------------------------- forms

# Values are sympy expressions or, for fast randomized checks, sp.Poly.

def _ex(v):
    return v if isinstance(v, sp.Poly) else sp.expand(v)


def _diff(v, x):
    return v.diff(x) if isinstance(v, sp.Poly) else sp.diff(v, x)


def _nz(v):
    return not v.is_zero if isinstance(v, sp.Poly) else v != 0


def _clean(f):
    out = {}
    for k, v in f.items():
        v = _ex(v)
        if _nz(v):
            out[k] = v
    return out


def _sort_sign(idx):
    idx = list(idx)
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


def form_add(*fs, coeffs=None):
    out = {}
    for n, f in enumerate(fs):
        c = 1 if coeffs is None else coeffs[n]
        for k, v in f.items():
            out[k] = out.get(k, 0) + c * v
    return _clean(out)


def form_scale(f, c):
    return _clean({k: c * v for k, v in f.items()})


def wedge(a, b):
    out = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            if set(ka) & set(kb):
                continue
            s, k = _sort_sign(ka + kb)
            out[k] = out.get(k, 0) + s * va * vb
    return _clean(out)


def ext_d(a, x):
    out = {}
    for k, v in a.items():
        for i, xi in enumerate(x):
            if i in k:
                continue
            dv = _diff(v, xi)
            if not _nz(dv):
                continue
            s, kk = _sort_sign((i,) + k)
            out[kk] = out.get(kk, 0) + s * dv
    return _clean(out)


def interior(X, a):
    """i_X on a form: contract the first slot."""
    out = {}
    for k, v in a.items():
        for pos, i in enumerate(k):
            if not _nz(X[i]):
                continue
            kk = k[:pos] + k[pos + 1:]
            out[kk] = out.get(kk, 0) + (-1) ** pos * X[i] * v
    return _clean(out)


def lie_form(X, a, x):
    return form_add(interior(X, ext_d(a, x)), ext_d(interior(X, a), x))


def one_form(xi):
    return _clean({(i,): v for i, v in enumerate(xi)})


def form_components(f, m):
    return [_ex(f.get((i,), 0)) for i in range(m)]


def func_d(f, x):
    return [_diff(f, xi) for xi in x]


def vec_apply(X, f, x):
    return _ex(sum(X[i] * _diff(f, x[i]) for i in range(len(x))))


def vec_bracket(X, Y, x):
    m = len(x)
    return [_ex(sum(X[j] * _diff(Y[i], x[j]) - Y[j] * _diff(X[i], x[j]) for j in range(m)))
            for i in range(m)]


def conj(f):
    """Complex conjugate of an expression in real coordinates."""
    return sp.expand(sp.conjugate(sp.sympify(f)))


# ---------------------------------------------------------------- sections

@dataclass
class Section:
    X: list
    xi: list

    @classmethod
    def zero(cls, m):
        return cls([0] * m, [0] * m)

    def __add__(self, o):
        return Section([_ex(a + b) for a, b in zip(self.X, o.X)],
                       [_ex(a + b) for a, b in zip(self.xi, o.xi)])

    def __sub__(self, o):
        return self + o.scale(-1)

    def scale(self, c):
        return Section([_ex(c * a) for a in self.X], [_ex(c * a) for a in self.xi])

    def is_zero(self):
        return not any(_nz(_ex(a)) for a in self.X + self.xi)

    def conjugate(self):
        return Section([conj(a) for a in self.X], [conj(a) for a in self.xi])


def vector(comps):
    return Section(list(comps), [0] * len(comps))


def covector(comps):
    return Section([0] * len(comps), list(comps))


def anchor(A):
    return A.X


def pairing(A, B):
    m = len(A.X)
    return _ex(sp.Rational(1, 2) * sum(A.X[i] * B.xi[i] + B.X[i] * A.xi[i] for i in range(m)))


def D(f, x):
    """⟨D f, A⟩ = ½ π(A) f, i.e. D f = df."""
    return covector(func_d(f, x))


def dorfman(A, B, H, x):
    m = len(x)
    vec = vec_bracket(A.X, B.X, x)
    eta, zeta = one_form(B.xi), one_form(A.xi)
    f = lie_form(A.X, eta, x)
    f = form_add(f, interior(B.X, ext_d(zeta, x)), coeffs=[1, -1])
    if H:
        f = form_add(f, interior(B.X, interior(A.X, H)))
    return Section(vec, form_components(f, m))


def courant(A, B, H, x):
    return (dorfman(A, B, H, x) - dorfman(B, A, H, x)).scale(sp.Rational(1, 2))


def clifford(A, phi):
    """(X + ζ)·φ = i_X φ + ζ ∧ φ."""
    return form_add(interior(A.X, phi), wedge(one_form(A.xi), phi))


def reverse(phi):
    return {k: (-1) ** (len(k) * (len(k) - 1) // 2) * v for k, v in phi.items()}


def mukai(phi, psi, m):
    """Top-degree coefficient of φ^T ∧ ψ."""
    return sp.expand(wedge(reverse(phi), psi).get(tuple(range(m)), 0))


def form_exp(w, m):
    out, term = {(): sp.Integer(1)}, {(): sp.Integer(1)}
    for k in range(1, m // 2 + 1):
        term = form_scale(wedge(term, w), sp.Rational(1, k))
        out = form_add(out, term)
    return out


def conj_form(phi):
    return _clean({k: conj(v) for k, v in phi.items()})


# ---------------------------------------------------------------- random data

def random_poly(x, rng, degree=2, terms=3, span=3, domain="QQ"):
    monos = [sp.Integer(1)] + list(x)
    if degree >= 2:
        monos += [a * b for a, b in combinations(list(x) + list(x), 2)]
    monos = sorted(set(monos), key=sp.default_sort_key)
    e = sum(rng.randint(-span, span) * rng.choice(monos) for _ in range(terms))
    return sp.Poly(e, *x, domain=domain)


def random_section(x, rng, domain="QQ"):
    m = len(x)
    return Section([random_poly(x, rng, domain=domain) for _ in range(m)],
                   [random_poly(x, rng, domain=domain) for _ in range(m)])


def three_form_closed(H, x):
    return not ext_d(H, x)


def courant_axioms_check(H, x, trials=50, seed=0):
    """Number of failing trials per axiom on random polynomial sections."""
    rng = random.Random(seed)
    dom = "QQ_I" if any(sp.sympify(v).has(sp.I) for v in H.values()) else "QQ"
    try:
        H = {k: sp.Poly(v, *x, domain=dom) for k, v in H.items()}
    except sp.PolynomialError:
        raise ValueError("H must be polynomial in the coordinates")
    fails = {k: 0 for k in ("anchor", "leibniz", "function", "symmetric", "invariance",
                            "dorfman-courant", "pi-D")}
    for _ in range(trials):
        A, B, C = (random_section(x, rng, dom) for _ in range(3))
        f, g = random_poly(x, rng, domain=dom), random_poly(x, rng, domain=dom)
        br = lambda P, Q: dorfman(P, Q, H, x)
        AB = br(A, B)
        if any(_nz(a - b) for a, b in zip(AB.X, vec_bracket(A.X, B.X, x))):
            fails["anchor"] += 1
        if not (br(A, br(B, C)) - br(AB, C) - br(B, br(A, C))).is_zero():
            fails["leibniz"] += 1
        lhs = br(A, B.scale(f))
        rhs = AB.scale(f) + B.scale(vec_apply(A.X, f, x))
        if not (lhs - rhs).is_zero():
            fails["function"] += 1
        sym = br(B, C) + br(C, B)
        if _nz(pairing(A, sym) - vec_apply(A.X, pairing(B, C), x)) or \
                not (sym - D(pairing(B, C), x).scale(2)).is_zero():
            fails["symmetric"] += 1
        if _nz(vec_apply(A.X, pairing(B, C), x) - pairing(AB, C) - pairing(B, br(A, C))):
            fails["invariance"] += 1
        if not (AB - courant(A, B, H, x) - D(pairing(A, B), x)).is_zero():
            fails["dorfman-courant"] += 1
        if _nz(pairing(D(f, x), D(g, x))) or any(_nz(v) for v in D(f, x).X):
            fails["pi-D"] += 1
    return fails


def parse_three_form(text, x):
    """Lines ``i j k : expr`` (1-based coordinate indices)."""
    names = {str(s): s for s in x}
    H = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        idx, expr = line.split(":", 1)
        ids = [int(t) - 1 for t in idx.split()]
        if len(ids) != 3:
            raise ValueError("three indices expected: %r" % line)
        s, k = _sort_sign(ids)
        if len(set(k)) < 3:
            continue
        H[k] = H.get(k, 0) + s * sp.sympify(expr, locals=names)
    return _clean(H)


# ---------------------------------------------------------------- bihermitian data

def omega_of(g, J):
    """ω = g J as a matrix, ω_ij = g_ik J^k_j."""
    return g * J


def two_form(M):
    m = M.shape[0]
    return _clean({(i, j): M[i, j] for i in range(m) for j in range(i + 1, m)})


def bihermitian_to_GCS(g, Jp, Jm):
    """Generalized complex structures at b = 0 and a residual report."""
    m = g.shape[0]
    wp, wm = omega_of(g, Jp), omega_of(g, Jm)
    wpi, wmi = wp.inv(), wm.inv()
    out = []
    for s in (1, -1):
        top = (Jp + s * Jm).row_join(-(wpi - s * wmi))
        bot = (wp - s * wm).row_join(-(Jp.T + s * Jm.T))
        out.append(sp.simplify(top.col_join(bot) / 2))
    J1, J2 = out
    one = sp.eye(2 * m)
    G = sp.simplify(-J1 * J2)
    pair = sp.zeros(m, m).row_join(sp.eye(m)).col_join(sp.eye(m).row_join(sp.zeros(m, m))) / 2
    metric = sp.simplify(pair * G)
    report = {
        "J1^2+1": sp.simplify(J1 * J1 + one) == sp.zeros(2 * m),
        "J2^2+1": sp.simplify(J2 * J2 + one) == sp.zeros(2 * m),
        "commute": sp.simplify(J1 * J2 - J2 * J1) == sp.zeros(2 * m),
        "orthogonal1": sp.simplify(J1.T * pair * J1 - pair) == sp.zeros(2 * m),
        "orthogonal2": sp.simplify(J2.T * pair * J2 - pair) == sp.zeros(2 * m),
        "G symmetric": sp.simplify(metric - metric.T) == sp.zeros(2 * m),
    }
    try:
        report["G definite"] = bool(metric.is_positive_definite or (-metric).is_positive_definite)
    except (TypeError, ValueError):
        report["G definite"] = None
    return J1, J2, G, report


def poisson_tensors(g, Jp, Jm):
    wpi, wmi = omega_of(g, Jp).inv(), omega_of(g, Jm).inv()
    return -wpi + wmi, -wpi - wmi


def standard_J(n):
    """J ∂_x = ∂_y on each pair (x_a, y_a) of real coordinates."""
    J = sp.zeros(2 * n)
    for a in range(n):
        J[2 * a + 1, 2 * a] = 1
        J[2 * a, 2 * a + 1] = -1
    return J


# ---------------------------------------------------------------- charts and frames

@dataclass
class Chart:
    """Real coordinates x and complex coordinates z^α(x) holomorphic for J."""
    x: list
    z: list
    dz: list = field(default_factory=list)
    dzb: list = field(default_factory=list)
    d_z: list = field(default_factory=list)
    d_zb: list = field(default_factory=list)

    def __post_init__(self):
        m = len(self.x)
        self.dz = [func_d(f, self.x) for f in self.z]
        self.dzb = [func_d(conj(f), self.x) for f in self.z]
        jac = sp.Matrix(self.dz + self.dzb)
        inv = sp.simplify(jac.inv())
        n = len(self.z)
        self.d_z = [[inv[i, a] for i in range(m)] for a in range(n)]
        self.d_zb = [[inv[i, n + a] for i in range(m)] for a in range(n)]

    def cauchy_riemann(self, J):
        """Residual of dz ∘ J = i dz for every holomorphic coordinate."""
        res = []
        for row in self.dz:
            r = sp.Matrix([row]) * J - sp.I * sp.Matrix([row])
            res.append(sp.simplify(r) == sp.zeros(1, len(self.x)))
        return all(res)


def hermitian_metric(g, ch):
    """g_{αβ̄} = g(∂_α, ∂_β̄)."""
    n = len(ch.z)
    G = sp.zeros(n)
    for a in range(n):
        for b in range(n):
            G[a, b] = sp.simplify((sp.Matrix([ch.d_z[a]]) * g * sp.Matrix(ch.d_zb[b]))[0])
    return G


def frames(g, ch, sign):
    """e_α = ∂_α ± g_{αβ̄} dz̄^β and e^α = dz^α ± g^{αβ̄} ∂_β̄."""
    n, m = len(ch.z), len(ch.x)
    h = hermitian_metric(g, ch)
    hi = sp.simplify(h.inv())
    low, up = [], []
    for a in range(n):
        X = list(ch.d_z[a])
        xi = [sp.expand(sign * sum(h[a, b] * ch.dzb[b][i] for b in range(n))) for i in range(m)]
        low.append(Section(X, xi))
        X = [sp.expand(sign * sum(hi[a, b] * ch.d_zb[b][i] for b in range(n))) for i in range(m)]
        up.append(Section(X, list(ch.dz[a])))
    return low, up


def frame_report(g, ch, J, H, sign):
    low, up = frames(g, ch, sign)
    x = ch.x
    n = len(low)
    h = hermitian_metric(g, ch)
    rep = {"holomorphic": ch.cauchy_riemann(J)}
    rep["duality"] = all(sp.simplify(pairing(low[a], up[b]) - (1 if a == b else 0)) == 0
                         for a in range(n) for b in range(n))
    rep["isotropic"] = all(sp.simplify(pairing(low[a], low[b])) == 0 and sp.simplify(pairing(up[a], up[b])) == 0
                           for a in range(n) for b in range(n))
    rep["brackets vanish"] = all(dorfman(low[a], low[b], H, x).is_zero() and dorfman(up[a], up[b], H, x).is_zero()
                                 for a in range(n) for b in range(n))
    conj_ok = True
    for a in range(n):
        rhs = Section.zero(len(x))
        for b in range(n):
            rhs = rhs + up[b].scale(sign * conj(h[a, b]))
        conj_ok &= (low[a].conjugate() - rhs).is_zero()
    rep["conjugation"] = conj_ok
    return rep


def structure_functions(plus, minus, H, x):
    """Pairings of Dorfman brackets of adapted frames; each table maps an
    index triple to a function."""
    (ep, eup), (em, eum) = plus, minus
    n = len(ep)
    rng = range(n)
    t = {}
    for s, lo, upf in (("+", ep, eup), ("-", em, eum)):
        t["c%s_low" % s] = {(a, b, c): sp.simplify(pairing(dorfman(lo[a], lo[b], H, x), upf[c]))
                            for a in rng for b in rng for c in rng}
        t["c%s_up" % s] = {(a, b, c): sp.simplify(pairing(dorfman(upf[a], upf[b], H, x), lo[c]))
                           for a in rng for b in rng for c in rng}
    t["d_low"] = {(a, b, c): sp.simplify(pairing(dorfman(ep[a], em[b], H, x), eup[c])) for a in rng for b in rng for c in rng}
    t["e_low"] = {(a, b, c): sp.simplify(pairing(dorfman(ep[a], em[b], H, x), eum[c])) for a in rng for b in rng for c in rng}
    t["d_up"] = {(a, b, c): sp.simplify(pairing(dorfman(eup[a], eum[b], H, x), ep[c])) for a in rng for b in rng for c in rng}
    t["e_up"] = {(a, b, c): sp.simplify(pairing(dorfman(eup[a], eum[b], H, x), em[c])) for a in rng for b in rng for c in rng}
    return t


# ---------------------------------------------------------------- divergence / modular class

def divergence_vector(X, mu, x):
    """Local formula (1/μ̃) ∂_i(μ̃ X^i)."""
    if sp.simplify(mu) == 0:
        raise ValueError("volume density vanishes")
    return sp.simplify(sum(sp.diff(mu * X[i], x[i]) for i in range(len(x))) / mu)


def divergence(P, mu, x):
    """(div P)^{J} = (1/μ̃) ∂_i(μ̃ P^{iJ}) for a multivector stored as
    ``{sorted index tuple: component}``; returns the same format."""
    if sp.simplify(mu) == 0:
        raise ValueError("volume density vanishes")
    out = {}
    for k, v in P.items():
        for pos, i in enumerate(k):
            rest = k[:pos] + k[pos + 1:]
            # bring index i to the front: sign (-1)^pos
            out[rest] = out.get(rest, 0) + (-1) ** pos * sp.diff(mu * v, x[i])
    return {k: s for k, s in ((k, sp.simplify(v / mu)) for k, v in out.items()) if s != 0}


def bivector(M):
    m = M.shape[0]
    return {(i, j): M[i, j] for i in range(m) for j in range(i + 1, m) if M[i, j] != 0}


def div_mu(e, mu, x):
    """div_μ(e) with div_μ(e) μ = −Lie_{π e} μ."""
    return -divergence_vector(e.X, mu, x)


def modular_representative(L, Ldual, mu, x, H=None, zeta_bar=1):
    """θ(e_i) = Σ_j ⟨[e_i, e_j], e^j⟩ − div_μ(e_i) + π(e_i) log ζ̄."""
    out = []
    for ei in L:
        tr = sum(pairing(dorfman(ei, ej, H, x), ed) for ej, ed in zip(L, Ldual))
        extra = vec_apply(ei.X, sp.log(zeta_bar), x) if zeta_bar != 1 else 0
        out.append(sp.simplify(tr - div_mu(ei, mu, x) + extra))
    return out


def d_H(rho, H, x):
    out = ext_d(rho, x)
    if H:
        out = form_add(out, wedge(H, rho))
    return out


def chi_section(rho, L, Ldual, H, x):
    """χ = Σ a_i e^i with d_H ρ = χ·ρ; returns the values χ(e_i) = 2⟨χ, e_i⟩."""
    a = sp.symbols("a0:%d" % len(Ldual))
    lhs = d_H(rho, H, x)
    rhs = {}
    for ai, ed in zip(a, Ldual):
        rhs = form_add(rhs, form_scale(clifford(ed, rho), ai))
    eqs = [sp.expand(v) for v in form_add(lhs, rhs, coeffs=[1, -1]).values()]
    sol = sp.solve(eqs, a, dict=True) if eqs else [{}]
    if not sol:
        raise ValueError("d_H ρ is not of the form χ·ρ")
    s = sol[0]
    vals = [sp.simplify(2 * s.get(ai, 0)) for ai in a]
    return vals


def clifford_top(Ldual, rho):
    out = rho
    for ed in reversed(Ldual):
        out = clifford(ed, out)
    return out


def zeta_coefficient(rho, Ldual, m):
    """h with ρ̄ = h (e^1 ∧ ... ∧ e^k)·ρ."""
    base = clifford_top(Ldual, rho)
    target = conj_form(rho)
    for k, v in base.items():
        h = sp.simplify(target.get(k, 0) / v)
        if all(sp.simplify(r) == 0 for r in form_add(target, form_scale(base, h), coeffs=[1, -1]).values()):
            return h
    raise ValueError("conjugate spinor is not in the top Clifford orbit")


def zeta_bar_coefficient(rho, L, Ldual, m):
    """Coefficient of ζ̄ in the basis e_1 ∧ ... ∧ e_k of det L."""
    h = zeta_coefficient(rho, Ldual, m)
    k = len(L)
    M = sp.zeros(k)
    for i, ed in enumerate(Ldual):
        # conj(e^i) = Σ_j ⟨conj(e^i), e^j⟩ e_j
        c = ed.conjugate()
        for j in range(k):
            M[j, i] = sp.simplify(pairing(c, Ldual[j]))
    return sp.simplify(conj(h) * M.det())


def dilaton(rho, vol_density, m):
    """Φ = −½ log((ρ, ρ̄)/vol_g)."""
    mk = mukai(rho, conj_form(rho), m)
    if sp.simplify(mk) == 0:
        raise ValueError("vanishing Mukai norm")
    return sp.simplify(-sp.log(sp.simplify(mk / vol_density)) / 2)


def v_forms(g, J, H, sign, m):
    """v_i = ±½ J^j_i J^k_l g^{ml} H_{kjm}."""
    gi = g.inv()
    Hc = lambda a, b, c: _three(H, a, b, c)
    out = []
    for i in range(m):
        s = 0
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    for mm in range(m):
                        s += J[j, i] * J[k, l] * gi[mm, l] * Hc(k, j, mm)
        out.append(sp.simplify(sign * s / 2))
    return out


def _three(H, a, b, c):
    if len({a, b, c}) < 3:
        return 0
    s, k = _sort_sign((a, b, c))
    return s * H.get(k, 0)


# ---------------------------------------------------------------- flat model

def flat_chart(n):
    xs = sp.symbols(" ".join("x%d y%d" % (a, a) for a in range(1, n + 1)), real=True)
    xs = list(xs)
    z = [xs[2 * a] + sp.I * xs[2 * a + 1] for a in range(n)]
    return Chart(xs, z)


def flat_cy_checks(n=1):
    """Flat Calabi-Yau patch: frames, structure functions, modular
    representatives, dilaton, v± and Poisson divergences."""
    ch = flat_chart(n)
    m, x = 2 * n, ch.x
    g = sp.eye(m)
    J = standard_J(n)
    H = {}
    plus, minus = frames(g, ch, 1), frames(g, ch, -1)
    rep = {"frames+": frame_report(g, ch, J, H, 1), "frames-": frame_report(g, ch, J, H, -1)}
    sf = structure_functions(plus, minus, H, x)
    rep["structure functions zero"] = all(v == 0 for t in sf.values() for v in t.values())
    Omega = {(): sp.Integer(1)}
    for a in range(n):
        Omega = wedge(Omega, one_form(ch.dz[a]))
    vol = sp.sqrt(g.det())
    mu = mukai(Omega, conj_form(Omega), m)
    Phi = dilaton(Omega, vol, m)
    rep["dilaton constant"] = all(sp.diff(Phi, xi) == 0 for xi in x)
    L1 = plus[0] + minus[0]
    L1d = plus[1] + minus[1]
    rep["modular zero"] = all(v == 0 for v in modular_representative(L1, L1d, mu, x, H))
    vs = [v_forms(g, J, H, s, m) for s in (1, -1)]
    dPhi = func_d(Phi, x)
    rep["v + 2dPhi"] = all(sp.simplify(v[i] + 2 * dPhi[i]) == 0 for v in vs for i in range(m))
    P1, P2 = poisson_tensors(g, J, J)
    dens = sp.exp(-2 * Phi) * vol
    rep["Poisson divergence"] = not divergence(bivector(P1), dens, x) and not divergence(bivector(P2), dens, x)
    rep["omega inverse divergence"] = not divergence(bivector(omega_of(g, J).inv()), dens, x)
    return rep


def clifford_identities(m, trials=20, seed=0):
    """Failure counts on random constant data of: A·B· + B·A· = 2⟨A,B⟩,
    (A·φ, ψ) = (φ, A·ψ), (e^B φ, e^B ψ) = (φ, ψ) and
    (φ, ψ) = (−1)^{m(m−1)/2} (ψ, φ)."""
    rng = random.Random(seed)
    r = lambda: sp.Integer(rng.randint(-3, 3))
    subsets = [k for d in range(m + 1) for k in combinations(range(m), d)]
    fails = {"clifford relation": 0, "mukai invariance": 0, "B-field invariance": 0, "mukai symmetry": 0}
    for _ in range(trials):
        A = Section([r() for _ in range(m)], [r() for _ in range(m)])
        B = Section([r() for _ in range(m)], [r() for _ in range(m)])
        phi, psi = ({k: r() for k in subsets} for _ in range(2))
        lhs = form_add(clifford(A, clifford(B, phi)), clifford(B, clifford(A, phi)))
        if _clean(form_add(lhs, phi, coeffs=[1, -2 * pairing(A, B)])):
            fails["clifford relation"] += 1
        if mukai(clifford(A, phi), psi, m) != mukai(phi, clifford(A, psi), m):
            fails["mukai invariance"] += 1
        b = {k: r() for k in combinations(range(m), 2)}
        eB = form_exp(b, m)
        if mukai(wedge(eB, phi), wedge(eB, psi), m) != mukai(phi, psi, m):
            fails["B-field invariance"] += 1
        if mukai(phi, psi, m) != (-1) ** (m * (m - 1) // 2) * mukai(psi, phi, m):
            fails["mukai symmetry"] += 1
    return fails


def mukai_sign_check(n):
    """(e^{iω}, e^{−iω}) / (Ω, Ω̄) with ω = gJ and Ω = dz^1 ∧ ... ∧ dz^n."""
    ch = flat_chart(n)
    m = 2 * n
    w = two_form(omega_of(sp.eye(m), standard_J(n)))
    a = mukai(form_exp(form_scale(w, sp.I), m), form_exp(form_scale(w, -sp.I), m), m)
    Omega = {(): sp.Integer(1)}
    for k in range(n):
        Omega = wedge(Omega, one_form(ch.dz[k]))
    b = mukai(Omega, conj_form(Omega), m)
    return sp.simplify(a / b), (-1) ** (m * (m - 1) // 2)


def modular_chi_check(f_expr=None):
    """ρ = e^f Ω on the flat n=1 patch with L the +i eigenbundle of the
    complex structure (T^{0,1} + T^{*1,0}): returns θ_s(e_i) − 2χ(e_i)."""
    ch = flat_chart(1)
    x, y = ch.x
    if f_expr is None:
        f_expr = x ** 2 * y + sp.I * x * y ** 2
    m = 2
    L = [vector(ch.d_zb[0]), covector(ch.dz[0])]
    Ld = [covector([2 * v for v in ch.dzb[0]]), vector([2 * v for v in ch.d_z[0]])]
    rho = form_scale(one_form(ch.dz[0]), sp.exp(f_expr))
    mu = mukai(rho, conj_form(rho), m)
    zb = zeta_bar_coefficient(rho, L, Ld, m)
    theta = modular_representative(L, Ld, mu, ch.x, None, zeta_bar=zb)
    chi = chi_section(rho, L, Ld, None, ch.x)
    return [sp.simplify(t - 2 * c) for t, c in zip(theta, chi)]


# ---------------------------------------------------------------- trace identity pack

SYMBOLS = ("phi+", "phib+", "phi-", "phib-", "Phi", "logvol", "psi1", "psi2")


class TraceIdentityPack:
    """Symbol algebra for the modular-class identities in adapted frames.

    Quantities are linear forms in SYMBOLS acted on by a derivation
    ``∂^s`` along the anchor of a frame e^s_α (s = + or −).  Declared
    relations: log√det g = φ^s + conj(φ^s) + 4Φ for both s, the ψ
    relations, and ∂^s conj(φ^s) = 0 (holomorphy).  Constant structure:
    c-functions vanish; the mixed traces are given by the identities
        d^α_{αβ} = −∂^-_β(φ^+ + 2Φ),  e^α_{βα} = ∂^+_β(φ^- + 2Φ).
    """

    def __init__(self, psi1_reading="-"):
        I = sp.I
        self.relations = [
            {"logvol": 1, "phi+": -1, "phib+": -1, "Phi": -4},
            {"logvol": 1, "phi-": -1, "phib-": -1, "Phi": -4},
            {"psi2": 1, "phi+": -I, "phi-": I},
        ]
        if psi1_reading == "-":
            self.relations.append({"psi1": 1, "phi-": -I, "phib+": I})
        else:
            self.relations.append({"psi1": 1, "phi+": -I, "phib-": I})
        self.killed = {"+": ["phib+"], "-": ["phib-"]}

    @staticmethod
    def lin(**kw):
        return {k.replace("_p", "+").replace("_m", "-"): v for k, v in kw.items()}

    def reduce_zero(self, sector, form):
        """True when ∂^sector(form) vanishes modulo the declared relations."""
        gens = [dict(r) for r in self.relations] + [{k: 1} for k in self.killed[sector]]
        cs = sp.symbols("k0:%d" % len(gens))
        eqs = []
        for s in SYMBOLS:
            eqs.append(sp.expand(form.get(s, 0) - sum(c * g.get(s, 0) for c, g in zip(cs, gens))))
        return bool(sp.linsolve(eqs, cs))

    def trace_e(self):
        # e^β_{αβ} = ∂^+_α(φ^- + 2Φ)
        return {"phi-": 1, "Phi": 2}

    def trace_d(self):
        # d^β_{βα} = −∂^-_α(φ^+ + 2Φ)
        return {"phi+": -1, "Phi": -2}

    def div_frame(self, convention="lie"):
        """div_μ(e^s_α) for μ = e^{−2Φ} vol_g as a linear form under ∂^s.

        ``lie``: div_μ(e) μ = −Lie_{π e} μ; ``local``: +(1/μ̃)∂(μ̃ X)."""
        logmu = {"Phi": -2, "logvol": 1}
        sgn = -1 if convention == "lie" else 1
        return {k: sgn * v for k, v in logmu.items()}

    def theta_forms(self, convention="lie"):
        I = sp.I
        div = self.div_frame(convention)
        add = lambda *fs: _lin_add(*fs)
        neg = lambda f: {k: -v for k, v in f.items()}
        out = {}
        # θ1(e^+_α) = c + e^β_{αβ} − div e^+_α + ∂^+(−log√g + iψ1)
        out[("theta1", "+")] = add(self.trace_e(), neg(div), {"logvol": -1, "psi1": I})
        # θ2(e^+_α) = c − e^β_{αβ} − div e^+_α + ∂^+(iψ2)
        out[("theta2", "+")] = add(neg(self.trace_e()), neg(div), {"psi2": I})
        # θ1(e^-_α): the mixed trace ⟨[e^-_α, e^+_β], e^β_+⟩ = −d^β_{βα}
        out[("theta1", "-")] = add(neg(self.trace_d()), neg(div), {"logvol": -1, "psi1": I})
        return out

    def check(self, convention="lie"):
        return {"%s(e^%s)" % k: self.reduce_zero(k[1], f) for k, f in self.theta_forms(convention).items()}


def _lin_add(*fs):
    out = {}
    for f in fs:
        for k, v in f.items():
            out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v != 0}


# ---------------------------------------------------------------- algebroid cochains

def _ce_structure(L, Ldual, H, x):
    """Structure constants c_ij^k = ⟨[e_i, e_j], e^k⟩ for ⟨e_i, e^j⟩ = δ_ij."""
    k = len(L)
    c = {}
    for i in range(k):
        for j in range(k):
            br = dorfman(L[i], L[j], H, x)
            for l in range(k):
                v = sp.simplify(pairing(br, Ldual[l]))
                if v.free_symbols & set(x):
                    raise ValueError("structure functions are not constant")
                if v != 0:
                    c[(i, j, l)] = v
    return c


def algebroid_differential(L, Ldual, sectors, H, x):
    """Ranks of the Chevalley-Eilenberg differential on constant cochains.

    ``sectors[i]`` is "+" or "-" for frame L[i].  The differential raises
    the "+" degree by one; returns {(q-, q+): rank of d on that cell}.
    Anchors act trivially on constants, so only structure constants enter.
    """
    c = _ce_structure(L, Ldual, H, x)
    k = len(L)
    plus = [i for i in range(k) if sectors[i] == "+"]
    minus = [i for i in range(k) if sectors[i] == "-"]

    def d_gen(l):
        # dθ^l = -½ Σ c_ij^l θ^i θ^j, keeping the part with one more "+" index
        out = {}
        for (i, j, ll), v in c.items():
            if ll != l:
                continue
            s, key = _sort_sign((i, j))
            if len(set(key)) < 2:
                continue
            out[key] = out.get(key, 0) - sp.Rational(1, 2) * s * v
        return out

    dg = [d_gen(l) for l in range(k)]

    def d_mono(mono):
        out = {}
        for pos, l in enumerate(mono):
            for key, v in dg[l].items():
                new = mono[:pos] + key + mono[pos + 1:]
                if len(set(new)) < len(new):
                    continue
                s, kk = _sort_sign(new)
                out[kk] = out.get(kk, 0) + (-1) ** pos * s * v
        return out

    ranks = {}
    for qm in range(len(minus) + 1):
        for qp in range(len(plus) + 1):
            monos = [tuple(sorted(a + b)) for a in combinations(minus, qm) for b in combinations(plus, qp)]
            images = []
            for mono in monos:
                img = {kk: v for kk, v in d_mono(mono).items()
                       if sum(1 for t in kk if t in plus) == qp + 1 and v != 0}
                images.append(img)
            keys = sorted(set().union(*images)) if images else []
            if not keys:
                ranks[(qm, qp)] = 0
                continue
            M = sp.Matrix([[img.get(kk, 0) for kk in keys] for img in images])
            ranks[(qm, qp)] = M.rank()
    return ranks


def algebroid_differential_flat(n):
    """Ranks for the conjugate frames of the flat patch (all zero)."""
    ch = flat_chart(n)
    g = sp.eye(2 * n)
    (ep, eup), (em, eum) = frames(g, ch, 1), frames(g, ch, -1)
    # conjugate frames span the dual of L1 inside the weight-0 cell
    L = [s.conjugate() for s in ep] + [s.conjugate() for s in em]
    Ld = []
    for s_low, s_up in ((ep, eup), (em, eum)):
        for a in range(n):
            v = s_up[a].conjugate()
            nrm = pairing(L[len(Ld)], v)
            Ld.append(v.scale(1 / nrm) if nrm != 0 else v)
    return algebroid_differential(L, Ld, ["+"] * n + ["-"] * n, {}, ch.x)
