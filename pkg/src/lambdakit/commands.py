"""Verbs shared by the CLI and script runs; each returns a Report."""
import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from importlib import resources

from . import bracket as BR
from . import dsl
from . import fields as F
from . import presentations as PR
from .scalars import I, ONE, num, render_coeff, render_number

SCHEMA = "lambdakit.report/1"


class Report:
    def __init__(self, command):
        self.command = command
        self.checks = []
        self.info = {}
        self._t0 = time.perf_counter()
        self._last = self._t0

    def add(self, name, ok, residual="0", **detail):
        now = time.perf_counter()
        self.checks.append({"name": name, "status": "pass" if ok else "fail",
                            "residual": residual, "seconds": round(now - self._last, 3),
                            **({"detail": detail} if detail else {})})
        self._last = now
        return ok

    @property
    def passed(self):
        return all(c["status"] == "pass" for c in self.checks)

    def as_dict(self):
        return {"schema": SCHEMA, "command": self.command, "passed": self.passed,
                "checks": self.checks, "info": self.info,
                "seconds": round(time.perf_counter() - self._t0, 3)}

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2, sort_keys=True, default=str)

    def to_text(self):
        lines = []
        for c in self.checks:
            line = "%s  %s" % ("PASS" if c["status"] == "pass" else "FAIL", c["name"])
            if c["residual"] not in ("0", "", None):
                line += "\n      residual: %s" % c["residual"]
            if "detail" in c:
                for k, v in c["detail"].items():
                    line += "\n      %s: %s" % (k, v)
            lines.append(line)
        for k, v in self.info.items():
            lines.append("%s: %s" % (k, v))
        lines.append("%s: %d/%d checks passed" % (self.command, sum(c["status"] == "pass" for c in self.checks),
                                                 len(self.checks)))
        return "\n".join(lines)


def _lp_render(P, lp):
    if not lp:
        return "0"
    return BR.BracketResult(P, lp).render()


def bundled(name):
    return str(resources.files("lambdakit").joinpath("data", name))


def load_script(path=None, text=None):
    if text is None:
        path = path or bundled("flat_cy_n1.lf")
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return dsl.build(dsl.parse(text))


def parse_expr(b, text, lam=False):
    """Parse one expression against a built script's names."""
    p = dsl._Parser(text)
    for nm in b.P.gen_names:
        p.names[nm] = "function" if b.P.kind(nm) == "function" else "gen"
    for nm in b.fields:
        p.names[nm] = "field"
    for nm in b.coeffs:
        p.names[nm] = "coeff"
    e = p.expr(lam=lam)
    if p.peek().kind != "EOF":
        p.error("unexpected %s" % dsl._desc(p.peek()), expected=["end of input"])
    terms = dsl._lam_terms(e, b, allow_lam=lam)
    return terms if lam else terms.get((0, 0), F.CoeffMul(num(0), F.Vac()))


# ---------------------------------------------------------------- scripts

def run_checks(b, report=None):
    """Run the check statements of a built script."""
    rep = report or Report("run")
    P = b.P
    eng = P.engine()
    named = dsl.named_fields_of(b)
    for st in b.checks:
        a = st.args
        kind = a[0]
        label = "line %d: %s" % (st.line, dsl.render(dsl.Script([st])).strip())
        try:
            if kind == "n22":
                _n22_into(rep, named, P, prefix="line %d: " % st.line)
            elif kind == "n2":
                J, H = dsl.to_field(a[1], b), dsl.to_field(a[2], b)
                r = PR.verify_single_n2(J, H, P, num(a[3]))
                ok = PR.n22_passed(r)
                rep.add(label, ok, _res_text(P, r), central=render_coeff(r["central"][""]),
                        expected=render_coeff(r["c/3"]))
            elif kind == "skew":
                r = BR.verify_skew(dsl.to_field(a[1], b), dsl.to_field(a[2], b), P)
                rep.add(label, not r, r.render())
            elif kind == "jacobi":
                r = BR.verify_jacobi(*(dsl.to_field(x, b) for x in a[1:4]), P)
                rep.add(label, not r, r.render())
            elif kind == "bracket":
                got = BR.lambda_bracket(dsl.to_field(a[1], b), dsl.to_field(a[2], b), P)
                exp = {k: eng.canon(v) for k, v in dsl._lam_terms(a[3], b).items()}
                d = BR.bracket_difference(got, exp)
                rep.add(label, not d, d.render(), value=got.render())
        except (dsl.ScriptError, KeyError, ValueError, TypeError) as exc:
            rep.add(label, False, "error: %s" % exc)
    return rep


def _res_text(P, r):
    bad = {k: _lp_render(P, v) for k, v in r["residuals"].items() if v}
    return "; ".join("%s: %s" % kv for kv in bad.items()) if bad else "0"


def _n22_into(rep, named, P, prefix="", dim_M=None):
    missing = [k for k in ("J+", "J-", "H+", "H-") if k not in named]
    if missing:
        raise KeyError("fields %s are not defined" % ", ".join(missing))
    r = PR.verify_n22(named, P, dim_M)
    for fam, res in r["residuals"].items():
        rep.add(prefix + fam, not res, _lp_render(P, res))
    for s, v in r["central"].items():
        rep.add(prefix + "central coefficient of [H%s_Λ H%s]" % (s, s), v == r["c/3"], "0" if v == r["c/3"] else
                "%s - %s" % (render_coeff(v), render_coeff(r["c/3"])), value=render_coeff(v),
                expected=render_coeff(r["c/3"]))
    return r


def verify_n22(path=None, dim_M=None):
    rep = Report("verify-n22")
    b = load_script(path)
    _n22_into(rep, dsl.named_fields_of(b), b.P, dim_M=dim_M)
    return rep


def verify_n2(path=None, J="J1", H="H", c=None):
    rep = Report("verify-n2")
    b = load_script(path)
    named = dsl.named_fields_of(b)
    c = num(Fraction(c)) if c is not None else num(3 * 2 * b.P.dim)
    r = PR.verify_single_n2(named[J], named[H], b.P, c)
    for fam, res in r["residuals"].items():
        rep.add(fam, not res, _lp_render(b.P, res))
    cv = r["central"][""]
    rep.add("central coefficient of [%s_Λ %s]" % (H, H), cv == r["c/3"], "0", value=render_coeff(cv),
            expected=render_coeff(r["c/3"]))
    return rep


def normalize(expr, path=None):
    rep = Report("normalize")
    b = load_script(path)
    st = F.canonical(parse_expr(b, expr), b.P)
    rep.add(expr, True, "0", normal_form=st.render())
    rep.info["normal_form"] = st.render()
    return rep


def bracket(a, b_text, path=None):
    rep = Report("bracket")
    b = load_script(path)
    r = BR.lambda_bracket(parse_expr(b, a), parse_expr(b, b_text), b.P)
    rep.info["value"] = r.render()
    rep.info["modes"] = r.as_dict()
    rep.info["rules"] = dict(r.trace)
    rep.add("[%s_Λ %s]" % (a, b_text), True, "0")
    return rep


# ---------------------------------------------------------------- axioms

def _axiom_worker(args):
    n, kind, seed, count = args
    P = PR.free_sigma_model(n)
    rng = random.Random(seed)
    eng = P.engine()
    if kind == "skew":
        pool = BR.monomials(P, 2)
        bad = 0
        for _ in range(count):
            a, b = _rand_state(P, pool, rng), _rand_state(P, pool, rng)
            if eng.skew_residual(a, b):
                bad += 1
        return bad
    if kind == "jacobi":
        pool = BR.monomials(P, Fraction(3, 2))
        bad = 0
        for _ in range(count):
            a, b, c = (_rand_state(P, pool, rng) for _ in range(3))
            if eng.jacobi_residual(a, b, c):
                bad += 1
        return bad
    if kind == "quasi-assoc":
        from .fock import Oracle
        pool = BR.monomials(P, 1)
        orc = Oracle(P)
        bad = 0
        for _ in range(count):
            a, b, c = (F.State(P, _rand_state(P, pool, rng)).to_expr() for _ in range(3))
            if BR.verify_quasi_associativity(a, b, c, P, orc):
                bad += 1
        return bad
    raise ValueError(kind)


def _rand_state(P, pool, rng):
    """Homogeneous-parity combination of 1 to 3 monomials with small
    Gaussian-rational coefficients."""
    eng = P.engine()
    first = rng.choice(pool)
    par = eng.mpar(first)
    same = [m for m in pool if eng.mpar(m) == par]
    out = {}
    for m in [first] + [rng.choice(same) for _ in range(rng.randint(0, 2))]:
        out[m] = out.get(m, num(0)) + _rand_coeff(rng)
    return {m: c for m, c in out.items() if c}


def _rand_coeff(rng):
    return num(Fraction(rng.choice([1, -1, 2, -2, 3]), rng.randint(1, 3))) + I * num(rng.randint(-1, 1))


def verify_axioms(trials=200, seed=0, jobs=1, models=(1, 2), qa_trials=None):
    rep = Report("verify-axioms")
    tasks = []
    for n in models:
        for kind in ("skew", "jacobi", "quasi-assoc"):
            cnt = trials if kind != "quasi-assoc" else (qa_trials or max(1, trials // 4))
            tasks.append((n, kind, seed * 1000 + n * 10 + len(kind), cnt))
    results = _map(_axiom_worker, tasks, jobs)
    for (n, kind, _, cnt), bad in zip(tasks, results):
        rep.add("%s on free_sigma_model(%d), %d random instances" % (kind, n, cnt), bad == 0,
                "0" if not bad else "%d nonzero residuals" % bad)
    return rep


def _map(fn, tasks, jobs):
    if jobs and jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, tasks))
    return [fn(t) for t in tasks]


# ---------------------------------------------------------------- oracle

def _oracle_worker(args):
    from .fock import Oracle, compare_with_engine
    n, max_weight, cutoff, lo, hi = args
    P = PR.free_sigma_model(n)
    ms = BR.monomials(P, max_weight)
    exprs = [F.State(P, {m: ONE}).to_expr() for m in ms]
    orc = Oracle(P, cutoff)
    bad, compared, skipped = [], 0, 0
    for a in exprs[lo:hi]:
        for b in exprs:
            ok, d = compare_with_engine(a, b, P, orc)
            compared += 1
            skipped += len(orc.beyond)
            if not ok:
                bad.append((str(a), str(b), sorted(d)))
    return compared, bad, skipped


def oracle_central(n, cutoff):
    """λ²χ vacuum coefficient of [H+_Λ H+] (flat realization) and of the
    diagonal [H_Λ H], extracted from Fock commutators at a cutoff."""
    from .fock import Oracle
    P, named = PR.flat_free_fields(n)
    orc = Oracle(P, Fraction(cutoff))
    out = {}
    for k, H in (("H+", named["H+"]), ("H", PR.free_H(n))):
        tab = orc.commutator_structure(H, H, max_j=2)
        v = tab.get((2, 1), {}).get((), num(0))
        out[k] = v / 2   # the (2|1) mode carries 2! times the λ²χ coefficient
    return out


def oracle_compare(n=1, max_weight=2, cutoff=Fraction(5, 2), jobs=1, stability_cutoff=Fraction(7, 2),
                   untruncated=True):
    """Engine Λ-brackets against Fock commutators on all pairs of canonical
    monomials.  At a cutoff, coefficients above it are not representable
    and are skipped; the untruncated pass compares those as well."""
    rep = Report("oracle-compare")
    P = PR.free_sigma_model(n)
    total = len(BR.monomials(P, max_weight))
    jobs = max(1, jobs or 1)
    step = max(1, -(-total // (jobs * 4)))
    for cut in ([cutoff] + ([None] if untruncated else [])):
        tasks = [(n, max_weight, cut, lo, min(total, lo + step)) for lo in range(0, total, step)]
        compared, bad, skipped = 0, [], 0
        for c, b, k in _map(_oracle_worker, tasks, jobs):
            compared += c
            bad += b
            skipped += k
        rep.info.setdefault("pairs", compared)
        where = "cutoff %s" % cut if cut is not None else "untruncated"
        rep.add("engine = oracle on %d pairs of canonical monomials of weight <= %s (free_sigma_model(%d), %s)"
                % (compared, max_weight, n, where), not bad,
                "0" if not bad else "%d pairs differ, first: %s" % (len(bad), bad[0]),
                coefficients_above_cutoff=skipped)
    c1, c2 = oracle_central(n, cutoff), oracle_central(n, stability_cutoff)
    for k in c1:
        rep.add("central coefficient of [%s_Λ %s] stable from cutoff %s to %s" % (k, k, cutoff, stability_cutoff),
                c1[k] == c2[k], "0", value=render_number(c1[k]), value_at_stability_cutoff=render_number(c2[k]))
    rep.info["c/3 (H+)"] = render_number(c1["H+"])
    return rep


# ---------------------------------------------------------------- geometry

def _coords(m):
    import sympy as sp
    return list(sp.symbols("x1:%d" % (m + 1), real=True))


def check_courant(H_path=None, dim=None, trials=50, seed=0, expect_closed=None):
    from . import geometry as G
    rep = Report("geometry check-courant")
    text = ""
    if H_path:
        with open(H_path, encoding="utf-8") as fh:
            text = fh.read()
    idx = [int(t) for line in text.splitlines() for t in line.split("#", 1)[0].split(":", 1)[0].split()]
    m = dim or max(idx + [4])
    x = _coords(m)
    H = G.parse_three_form(text, x) if text else {}
    closed = G.three_form_closed(H, x)
    rep.info["H"] = {" ".join(str(i + 1) for i in k): str(v) for k, v in H.items()} or "0"
    rep.info["dH = 0"] = closed
    fails = G.courant_axioms_check(H, x, trials=trials, seed=seed)
    for ax, k in fails.items():
        want_zero = closed or ax != "leibniz"
        if want_zero:
            rep.add("%s (%d random sections)" % (ax, trials), k == 0, "0" if not k else "%d failing trials" % k)
        else:
            rep.add("%s detects dH != 0 (%d random sections)" % (ax, trials), k > 0,
                    "%d failing trials" % k)
    return rep


def geometry_frames(n=1):
    from . import geometry as G
    import sympy as sp
    rep = Report("geometry frames")
    ch = G.flat_chart(n)
    J = G.standard_J(n)
    for label, g in (("flat", sp.eye(2 * n)),
                     ("conformal", sp.exp(ch.x[0] * ch.x[1]) * sp.eye(2 * n))):
        for s, sign in (("+", 1), ("-", -1)):
            for k, v in G.frame_report(g, ch, J, {}, sign).items():
                rep.add("%s metric, sector %s: %s" % (label, s, k), bool(v), "0")
    pl, mi = G.frames(sp.eye(2 * n), ch, 1), G.frames(sp.eye(2 * n), ch, -1)
    sf = G.structure_functions(pl, mi, {}, ch.x)
    rep.add("flat structure functions vanish", all(v == 0 for t in sf.values() for v in t.values()), "0")
    return rep


def geometry_modular():
    from . import geometry as G
    rep = Report("geometry modular")
    res = G.modular_chi_check()
    rep.add("θ = 2χ for ρ = e^f Ω on flat C", all(r == 0 for r in res), ", ".join(map(str, res)))
    flat = G.flat_cy_checks(1)
    rep.add("flat modular representatives vanish", flat["modular zero"], "0")
    for conv, want in (("lie", True), ("local", False)):
        r = G.TraceIdentityPack().check(conv)
        ok = all(r.values()) if want else not any(r.values())
        rep.add("trace identities with %s divergence sign %s" % (conv, "close" if want else "fail (control)"),
                ok, "0", detail=str(r))
    r = G.TraceIdentityPack("+").check()
    rep.add("trace identities with the alternative phase relation", all(r.values()), "0")
    return rep


def geometry_dilaton(n=1):
    from . import geometry as G
    rep = Report("geometry dilaton")
    flat = G.flat_cy_checks(n)
    for k in ("dilaton constant", "v + 2dPhi", "Poisson divergence", "omega inverse divergence"):
        rep.add(k, flat[k], "0")
    return rep


def geometry_mukai(ms=(2, 4, 6), trials=20, seed=0):
    from . import geometry as G
    rep = Report("geometry mukai")
    for m in ms:
        c, want = G.mukai_sign_check(m // 2)
        rep.add("(e^{iω}, e^{-iω}) = (-1)^{m(m-1)/2} (Ω, Ω̄) for m = %d" % m, c == want, "0", c=str(c))
    for m in (2, 3, 4):
        for k, v in G.clifford_identities(m, trials=trials, seed=seed).items():
            rep.add("%s, m = %d (%d random)" % (k, m, trials), v == 0, "0" if not v else "%d failing" % v)
    return rep


# ---------------------------------------------------------------- twist

def twist_check(cutoff=2, n=1):
    from . import twist as TW
    rep = Report("twist check")
    tm = TW.TwistModule(n=n, cutoff=cutoff)
    rep.info["basis size"] = len(tm.basis)
    for k, v in TW.brst_check(tm).items():
        rep.add("%s = 0 at cutoff %s" % (k, cutoff), v == 0, "0" if not v else "%d nonzero entries" % v)
    neg = TW.negative_control(tm)
    rep.add("control: (½H+_(0|1))² != 0", neg > 0, "%d nonzero entries" % neg)
    rep.info["G0 with (0|1),(0|0) modes, nonzero entries"] = TW.printed_G_diagnostic(tm)
    return rep


def twist_cohomology(weight=0, diff="Q+", cutoff=2, n=1, stability=True):
    from . import twist as TW
    rep = Report("twist cohomology")
    r = TW.brst_cohomology(diff, weight, n=n, cutoff=cutoff, check_stability=stability)
    rows = r["rows"]
    rep.info["table"] = [{"degree": x["degree"], "cells": x["cells"], "dim": x["dim"], "dim_H": x["dim_H"]}
                         for x in rows]
    if stability:
        rep.add("cohomology of %s at weight %s stable under cutoff +1" % (diff, weight), bool(r["stable"]), "0")
    if diff == "Q+" and Fraction(weight) == 0:
        hand = TW.hand_weight_zero_cell(n)
        by_deg = {}
        for (qm, qp), d in hand.items():
            by_deg[qp] = by_deg.get(qp, 0) + d
        got = {x["degree"]: x["dim_H"] for x in rows}
        rep.add("Q0+ cohomology at weight 0 = algebroid cochain count", got == by_deg, "0",
                fock=str(got), cochains=str(by_deg))
    return rep
