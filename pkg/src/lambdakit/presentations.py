"""Concrete presentations and the named N=2 fields built on them."""
from fractions import Fraction

from . import fields as F
from .fields import CoeffMul, Gen, NO, S, Sum, T, Vac
from .bracket import lambda_bracket
from .engine import lp_add
from .presentation import Presentation
from .scalars import HALF, I, ONE, ZERO, CPoly, num, q

SECTORS = ("+", "-")


# ---------------------------------------------------------------- free fields

def B_name(i, bar=False):
    return "B[%d%s]" % (i, "b" if bar else "")


def Psi_name(i, bar=False):
    return "Psi[%d%s]" % (i, "b" if bar else "")


def free_sigma_model(n):
    """Free superfields B^i (even, weight 0) and Psi_i (odd, weight 1/2).

    i runs over 1..n and the conjugate indices 1b..nb; the only nonzero
    brackets are [Psi_i Λ B^j] = δ_i^j and their skew images.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    P = Presentation("free_sigma_model(%d)" % n)
    idx = [(i, bar) for bar in (False, True) for i in range(1, n + 1)]
    for i, bar in idx:
        P.add_gen(B_name(i, bar), 0, weight=0)
    for i, bar in idx:
        P.add_gen(Psi_name(i, bar), 1, weight=Fraction(1, 2))
    for i, bar in idx:
        P.set_bracket(Psi_name(i, bar), B_name(i, bar), 1)
    P.dim = n
    return P


def free_pairs(n):
    """n real free pairs B[k] (even, weight 0), Psi[k] (odd, weight 1/2)
    with [Psi[k] Λ B[k]] = 1."""
    if n < 1:
        raise ValueError("n must be at least 1")
    P = Presentation("free_pairs(%d)" % n)
    for k in range(1, n + 1):
        P.add_gen("B[%d]" % k, 0, weight=0)
    for k in range(1, n + 1):
        P.add_gen("Psi[%d]" % k, 1, weight=Fraction(1, 2))
    for k in range(1, n + 1):
        P.set_bracket("Psi[%d]" % k, "B[%d]" % k, 1)
    P.dim = n
    return P


def pairs_H(P):
    """SB SΨ + TB Ψ summed over the real pairs of ``free_pairs``."""
    parts = []
    for nm in P.gen_names:
        if nm.startswith("B["):
            b, p = Gen(nm), Gen("Psi" + nm[1:])
            parts.append(NO(S(b), S(p)))
            parts.append(NO(T(b), p))
    return Sum(tuple(parts))


def free_H(n):
    """SB^i SΨ_i + TB^i Ψ_i summed over all 2n real indices."""
    parts = []
    for bar in (False, True):
        for i in range(1, n + 1):
            b, p = Gen(B_name(i, bar)), Gen(Psi_name(i, bar))
            parts.append(NO(S(b), S(p)))
            parts.append(NO(T(b), p))
    return Sum(tuple(parts))


# ------------------------------------------------------------ U^ch patches

def e_name(sector, a):
    return "e[%s,%d]" % (sector, a)


def ed_name(sector, a):
    return "ed[%s,%d]" % (sector, a)


def frame_names(n):
    out = []
    for s in SECTORS:
        out += [e_name(s, a) for a in range(1, n + 1)]
        out += [ed_name(s, a) for a in range(1, n + 1)]
    return out


def _pairing(A, B):
    """⟨A, B⟩ on frame names: δ between e[s,a] and ed[s,a]."""
    def split(nm):
        kind, rest = nm.split("[")
        s, a = rest[:-1].split(",")
        return kind, s, int(a)
    ka, sa, ia = split(A)
    kb, sb, ib = split(B)
    if sa != sb or ia != ib or ka == kb:
        return ZERO
    return ONE


def uch_patch(n, structure=None, relations=None, functions=None, anchors=None):
    """Frames e_α^± = e[±,α] and duals e^α_± = ed[±,α] (odd, weight 1/2).

    ``structure`` maps an ordered frame pair (A, B) to the Dorfman bracket
    ``[A, B]`` as ``{C: coeff}``; then ``[A_Λ B] = [A, B] + 2χ⟨A, B⟩``.
    Coefficients may be numbers or ``CPoly`` constant symbols.
    ``functions`` lists function generators, ``anchors`` maps
    ``(frame, function) -> FieldExpr`` (the anchor action).
    """
    P = Presentation("uch_patch(%d)" % n)
    for f in functions or ():
        P.add_function(f)
    names = frame_names(n)
    for nm in names:
        P.add_gen(nm, 1, weight=Fraction(1, 2))
    structure = {k: dict(v) for k, v in (structure or {}).items()}
    # skew closure of the Dorfman part: [B, A] = -[A, B] + 2𝒟⟨A,B⟩, and
    # ⟨A,B⟩ is constant in frames
    for (A, B), val in list(structure.items()):
        rev = {C: -c for C, c in val.items()}
        if (B, A) in structure:
            if _expr_table(structure[(B, A)]) != _expr_table(rev):
                raise ValueError("structure pack is not skew-consistent for [%s, %s]" % (A, B))
        else:
            structure[(B, A)] = rev
    P.structure = structure
    P.frames = names
    P.dim = n
    for i, A in enumerate(names):
        for B in names[i:]:
            val = {}
            lin = [CoeffMul(c, Gen(C)) for C, c in structure.get((A, B), {}).items() if c]
            if lin:
                val[(0, 0)] = Sum(tuple(lin))
            p = _pairing(A, B)
            if p:
                val[(0, 1)] = CoeffMul(2 * p, Vac())
            if val:
                P.set_bracket(A, B, val)
    for (g, f), v in (anchors or {}).items():
        P.anchor(g, f, v)
    if relations:
        P.set_relations(relations)
    return P


def _expr_table(d):
    return {k: num(v) if not isinstance(v, CPoly) else v for k, v in d.items() if v}


def flat_patch(n):
    return uch_patch(n)


def flat_realization(n):
    """Flat frames written in the free fields of ``free_sigma_model(n)``:
    e[±,a] = Psi[a] ± S B[ab],  ed[±,a] = S B[a] ± Psi[ab]."""
    out = {}
    for s, sg in (("+", ONE), ("-", -ONE)):
        for a in range(1, n + 1):
            out[e_name(s, a)] = Sum((Gen(Psi_name(a)), CoeffMul(sg, S(Gen(B_name(a, True))))))
            out[ed_name(s, a)] = Sum((S(Gen(B_name(a))), CoeffMul(sg, Gen(Psi_name(a, True)))))
    return out


def frame_bracket(P, A, B):
    """The Dorfman bracket [A, B] of two frame generators as a FieldExpr."""
    val = getattr(P, "structure", {}).get((A, B), {})
    parts = [CoeffMul(c, Gen(C)) for C, c in val.items() if c]
    return Sum(tuple(parts)) if parts else None


def jscale(sector, name):
    """Eigenvalue of 𝒥_sector = (𝒥₁ ± 𝒥₂)/2 on a frame generator."""
    kind, rest = name.split("[")
    s = rest[:-1].split(",")[0]
    if s != sector:
        return ZERO
    return I if kind == "e" else -I


def apply_J(sector, expr):
    """𝒥_sector applied to a linear combination of frame generators."""
    if expr is None:
        return None
    if isinstance(expr, Gen):
        c = jscale(sector, expr.name)
        return CoeffMul(c, expr) if c else None
    if isinstance(expr, NO) and isinstance(expr.right, Gen):
        c = jscale(sector, expr.right.name)
        return CoeffMul(c, expr) if c else None
    if isinstance(expr, CoeffMul):
        inner = apply_J(sector, expr.child)
        return CoeffMul(expr.coeff, inner) if inner is not None else None
    if isinstance(expr, Sum):
        parts = [apply_J(sector, c) for c in expr.children]
        parts = [p for p in parts if p is not None]
        return Sum(tuple(parts)) if parts else None
    raise TypeError("𝒥 acts on frame sections only")


def _dual(name):
    kind, rest = name.split("[")
    return ("ed" if kind == "e" else "e") + "[" + rest


def D_function(P, f, sector=None):
    """𝒟f = ½ Σ (π(e^i)f e_i + π(e_i)f e^i) as a FieldExpr of f-derivative
    functions times frames; restricted to one sector if given."""
    parts = []
    for nm in P.frames:
        if sector and ("[%s," % sector) not in nm:
            continue
        val = P.declared_bracket(_dual(nm), f)
        if not val or (0, 0) not in val:
            continue
        parts.append(CoeffMul(HALF, NO(val[(0, 0)], Gen(nm))))
    return Sum(tuple(parts)) if parts else None


def build_J(sector, P, eta=None):
    """J^± = (i/2) Σ_α e^α_± e_α^± + i T η^±."""
    n = P.dim
    parts = [CoeffMul(I / 2, NO(Gen(ed_name(sector, a)), Gen(e_name(sector, a))))
             for a in range(1, n + 1)]
    if eta:
        parts.append(CoeffMul(I, T(Gen(eta))))
    return Sum(tuple(parts))


def _no3(a, b, c):
    if c is None:
        return None
    return NO(a, NO(b, c))


def build_H(sector, P, eta=None):
    """The superconformal vector H^± of one sector."""
    n = P.dim
    rng = range(1, n + 1)
    e = lambda a: Gen(e_name(sector, a))
    ed = lambda a: Gen(ed_name(sector, a))
    br = lambda A, B: frame_bracket(P, A.name, B.name)
    quartic = []
    for a in rng:
        for b in rng:
            for sign, x, y, z in ((1, ed(a), e(b), br(e(a), ed(b))),
                                  (-1, ed(a), ed(b), br(e(a), e(b))),
                                  (1, e(a), ed(b), br(ed(a), e(b))),
                                  (-1, e(a), e(b), br(ed(a), ed(b)))):
                t = _no3(x, y, z)
                if t is not None:
                    quartic.append(CoeffMul(q(sign, 4), t))
    parts = list(quartic)
    for a in rng:
        parts.append(CoeffMul(HALF, NO(ed(a), S(e(a)))))
        parts.append(CoeffMul(HALF, NO(e(a), S(ed(a)))))
    for a in rng:
        jb = apply_J(sector, br(ed(a), e(a)))
        if jb is not None:
            parts.append(CoeffMul(-I / 2, T(jb)))
    if eta:
        d = apply_J(sector, D_function(P, eta, sector))
        if d is not None:
            parts.append(CoeffMul(-I, T(d)))
    return Sum(tuple(parts))


def flat_free_fields(n):
    """The named fields of the flat patch pushed into the free model."""
    P = free_sigma_model(n)
    sub = flat_realization(n)
    named = named_fields(flat_patch(n))
    return P, {k: F.substitute(v, sub) for k, v in named.items()}


def named_fields(P, eta_plus=None, eta_minus=None):
    out = {
        "J+": build_J("+", P, eta_plus),
        "J-": build_J("-", P, eta_minus),
        "H+": build_H("+", P, eta_plus),
        "H-": build_H("-", P, eta_minus),
    }
    out["J1"] = Sum((out["J+"], out["J-"]))
    out["J2"] = Sum((out["J+"], CoeffMul(-ONE, out["J-"])))
    out["H"] = Sum((out["H+"], out["H-"]))
    return out


# ------------------------------------------------------------ N=2 checks

def _superconformal_rhs(eng, x, conf_weight):
    """(2T + 2·conf_weight·λ + χS) x as {(j, J): state}."""
    out = {}
    for key, st, c in (((0, 0), eng.T_state(x), 2 * ONE),
                       ((1, 0), x, 2 * num(conf_weight)),
                       ((0, 1), eng.S_state(x), ONE)):
        if st:
            cur = out.setdefault(key, {})
            for m, v in st.items():
                w = cur.get(m, ZERO) + c * v
                if w:
                    cur[m] = w
                else:
                    cur.pop(m, None)
    return {k: v for k, v in out.items() if v}


def _family(eng, a, b, expected):
    lp = eng.bracket_states(a, b)
    res = {k: dict(v) for k, v in lp.items()}
    lp_add(res, expected, -ONE)
    return lp, res


def _n2_families(P, J, H, c3, label=""):
    """Residuals of [JJ] = −(H + c3 λχ), [HJ] = (2T+2λ+χS)J,
    [HH] = (2T+3λ+χS)H + c3 λ²χ, and the measured λ²χ coefficient."""
    eng = P.engine()
    j, h = eng.canon(J), eng.canon(H)
    exp_jj = {(0, 0): {m: -v for m, v in h.items()}}
    if c3:
        exp_jj[(1, 1)] = {(): -num(c3)}
    exp_hh = _superconformal_rhs(eng, h, Fraction(3, 2))
    if c3:
        exp_hh[(2, 1)] = {(): num(c3)}
    out = {}
    _, out["[J%s_Λ J%s]" % (label, label)] = _family(eng, j, j, exp_jj)
    _, out["[H%s_Λ J%s]" % (label, label)] = _family(eng, h, j, _superconformal_rhs(eng, j, 1))
    lp, out["[H%s_Λ H%s]" % (label, label)] = _family(eng, h, h, exp_hh)
    central = lp.get((2, 1), {}).get((), ZERO)
    return out, central


def verify_n22(named, P, dim_M=None):
    """All six families of the two-sector N=2 relations with c = (3/2) dim M.

    Returns ``{"residuals": {family: {(j, J): state}}, "central": {s: value},
    "c/3": expected}``; every residual empty means the relations hold."""
    dim_M = dim_M if dim_M is not None else 2 * P.dim
    c3 = q(dim_M, 2)
    res, central = {}, {}
    eng = P.engine()
    for s in SECTORS:
        fam, central[s] = _n2_families(P, named["J" + s], named["H" + s], c3, s)
        res.update(fam)
    for s, t in (("+", "-"), ("-", "+")):
        for A, B in (("J", "J"), ("H", "J"), ("H", "H")):
            key = "[%s%s_Λ %s%s]" % (A, s, B, t)
            res[key] = eng.bracket_states(eng.canon(named[A + s]), eng.canon(named[B + t]))
    return {"residuals": res, "central": central, "c/3": c3}


def verify_single_n2(J, H, P, c):
    """N=2 relations for one pair (J, H) at central charge c."""
    res, central = _n2_families(P, J, H, q(1, 3) * num(c))
    return {"residuals": res, "central": {"": central}, "c/3": q(1, 3) * num(c)}


def n22_passed(report):
    return not any(report["residuals"].values()) and all(
        v == report["c/3"] for v in report["central"].values())


def commuting_split_check(named, P):
    """Both diagonal pairs (J1, H) and (J2, H) are N=2 at c = 3 dim M, the
    precondition of the splitting lemma; returns the two reports."""
    c = 3 * 2 * P.dim
    return {k: verify_single_n2(named[k], named["H"], P, c) for k in ("J1", "J2")}


def eta_patch(n=1):
    """Flat frames with one function ``eta``; π(e_a)eta = eta_{,a} and
    π(e^a)eta = eta^{,a} are further (constant) function generators."""
    anchors = {}
    for s in SECTORS:
        for a in range(1, n + 1):
            anchors[(e_name(s, a), "eta")] = Gen("eta_{,%d%s}" % (a, s))
            anchors[(ed_name(s, a), "eta")] = Gen("eta^{,%d%s}" % (a, s))
    P = Presentation("eta_patch(%d)" % n)
    P.add_function("eta")
    for s in SECTORS:
        for a in range(1, n + 1):
            P.add_function("eta^{,%d%s}" % (a, s))
            P.add_function("eta_{,%d%s}" % (a, s))
    for nm in frame_names(n):
        P.add_gen(nm, 1, weight=Fraction(1, 2))
    P.frames = frame_names(n)
    P.structure = {}
    P.dim = n
    for a in range(1, n + 1):
        for s in SECTORS:
            P.set_bracket(e_name(s, a), ed_name(s, a), {(0, 1): CoeffMul(2 * ONE, Vac())})
    for (g, f), v in anchors.items():
        P.anchor(g, f, v)
    return P


def eta_shift_check(n=1):
    """[iTη_Λ J₀] against ½λ(η^{,i}e_i − η_{,i}e^i) and against
    −iλ𝒥𝒟η, with J₀ the diagonal (η-free) J; returns both residuals."""
    P = eta_patch(n)
    eng = P.engine()
    J0 = Sum((build_J("+", P), build_J("-", P)))
    lp = lambda_bracket(CoeffMul(I, T(Gen("eta"))), J0, P).table
    got = {k: v.terms for k, v in lp.items()}
    frames = []
    for s in SECTORS:
        for a in range(1, n + 1):
            frames.append(CoeffMul(HALF, NO(Gen("eta^{,%d%s}" % (a, s)), Gen(e_name(s, a)))))
            frames.append(CoeffMul(-HALF, NO(Gen("eta_{,%d%s}" % (a, s)), Gen(ed_name(s, a)))))
    d = D_function(P, "eta")
    JD = Sum(tuple(x for x in (apply_J(s, d) for s in SECTORS) if x is not None))
    out = {}
    for label, expr in (("frames", Sum(tuple(frames))), ("JD", CoeffMul(-I, JD))):
        exp = {(1, 0): eng.canon(expr)}
        res = {k: dict(v) for k, v in got.items()}
        lp_add(res, exp, -ONE)
        out[label] = res
    return out


def d_up(b, a, c):
    return "d^{%d%d}_%d" % (b, a, c)


def trace_relation_pack(n):
    """Σ_β d^{βα}_β = η^{+,α-}, solved for the β = 1 term."""
    table = {}
    for a in range(1, n + 1):
        v = CPoly.symbol("eta+^{,%d-}" % a)
        for b in range(2, n + 1):
            v = v - CPoly.symbol(d_up(b, a, b))
        table[d_up(1, a, 1)] = v
    return table


def constant_structure_patch(n, pack=True):
    """Frames whose mixed brackets have constant symbolic structure
    functions: [e_α^+, e_β^-] = d^γ_{αβ} e_γ^+ + e^γ_{αβ} e_γ^-, and
    [e^α_+, e^β_-] = d^{αβ}_γ e^γ_+ + e^{αβ}_γ e^γ_-."""
    structure = {}
    rng = range(1, n + 1)
    for a in rng:
        for b in rng:
            low, up = {}, {}
            for c in rng:
                low[e_name("+", c)] = CPoly.symbol("d^%d_{%d%d}" % (c, a, b))
                low[e_name("-", c)] = CPoly.symbol("e^%d_{%d%d}" % (c, a, b))
                up[ed_name("+", c)] = CPoly.symbol(d_up(a, b, c))
                up[ed_name("-", c)] = CPoly.symbol("e^{%d%d}_%d" % (a, b, c))
            structure[(e_name("+", a), e_name("-", b))] = low
            structure[(ed_name("+", a), ed_name("-", b))] = up
    return uch_patch(n, structure=structure, relations=trace_relation_pack(n) if pack else None)
