"""Λ-brackets of field expressions and axiom residuals."""
from collections import Counter

from . import fields as F
from .engine import NonCanonicalInput, lp_add
from .lambda_core import GAM, LAM, HPoly, render_hpoly
from .scalars import ONE


class BracketResult:
    """``Σ λ^j χ^J X_{j|J}`` with canonical coefficients, plus the count of
    recursion rules that fired while computing it (cache misses only)."""

    def __init__(self, P, table, trace=None):
        self.P = P
        self.table = {k: F.State(P, v) for k, v in table.items() if v}
        self.trace = Counter(trace or {})

    @property
    def value(self):
        return HPoly((LAM,), {(k,): v for k, v in self.table.items()})

    def coefficient(self, j, J):
        return self.table.get((j, J), F.State(self.P))

    def central(self, j, J):
        """Vacuum coefficient of λ^j χ^J."""
        return self.coefficient(j, J).scalar_part()

    def __bool__(self):
        return bool(self.table)

    def __eq__(self, other):
        if isinstance(other, BracketResult):
            return self.table == other.table
        if other == 0:
            return not self.table
        return NotImplemented

    def render(self):
        return render_hpoly(self.value, lambda s: s.render())

    def as_dict(self):
        return {"%d|%d" % k: v.render() for k, v in sorted(self.table.items())}

    def __repr__(self):
        return "BracketResult(%s)" % self.render()


def _state(e, P, strict):
    eng = P.engine()
    if strict:
        if not isinstance(e, F.State):
            raise NonCanonicalInput("expected a canonical State, got %r" % (e,))
        for m in e.terms:
            if not eng.is_canonical(m):
                raise NonCanonicalInput("monomial %r is not canonical" % (m,))
    return eng.canon(e)


def lambda_bracket(a, b, P, strict=False):
    """[a_Λ b]; inputs are normalized first unless ``strict``."""
    eng = P.engine()
    sa, sb = _state(a, P, strict), _state(b, P, strict)
    before = Counter(eng.rules)
    lp = eng.bracket_states(sa, sb)
    return BracketResult(P, lp, eng.rules - before)


def verify_skew(a, b, P):
    eng = P.engine()
    return BracketResult(P, eng.skew_residual(eng.canon(a), eng.canon(b)))


class JacobiResidual:
    """Residual in H⊗H: keys ((j, J), (k, K)) for λ^j χ^J γ^k η^K."""

    def __init__(self, P, table):
        self.P = P
        self.table = {k: F.State(P, v) for k, v in table.items() if v}

    @property
    def value(self):
        return HPoly((LAM, GAM), dict(self.table))

    def __bool__(self):
        return bool(self.table)

    def render(self):
        return render_hpoly(self.value, lambda s: s.render())


def verify_jacobi(a, b, c, P):
    eng = P.engine()
    return JacobiResidual(P, eng.jacobi_residual(eng.canon(a), eng.canon(b), eng.canon(c)))


def verify_quasi_associativity(a, b, c, P, oracle=None):
    """Engine normal form of ((ab)c), obtained by re-association into
    a(bc) plus corrections, against the Fock oracle's state of the same
    left-nested product (built from modes, no re-association).  Returns
    the exact difference vector; empty means agreement."""
    from .fock import Oracle, _vadd
    orc = oracle or Oracle(P)
    eng = P.engine()
    lhs = orc.state(F.State(P, eng.reassociate_states(eng.canon(a), eng.canon(b), eng.canon(c))))
    rhs = orc.state(F.NO(F.NO(a, b), c))
    return _vadd(dict(lhs), rhs, -ONE)


def bracket_difference(r, expected):
    """r − expected, both {(j, J): state}."""
    out = {k: dict(v.terms) for k, v in r.table.items()}
    lp_add(out, expected, -ONE)
    return BracketResult(r.P, out)


def monomials(P, max_weight, min_weight=0):
    """Canonical monomials of weight in (min_weight, max_weight], excluding
    the vacuum, in deterministic order."""
    from fractions import Fraction
    eng = P.engine()
    max_weight = Fraction(max_weight)
    atoms = []
    for g, name in enumerate(P.gen_names):
        w0 = P.weight(name)
        for s in (0, 1):
            t = 0
            while True:
                w = w0 + Fraction(s, 2) + t
                if w > max_weight:
                    break
                if w > 0:
                    atoms.append(((g, s, t), w))
                t += 1
    atoms.sort()
    out = []

    def rec(i, cur, w):
        if cur and w > min_weight:
            out.append(tuple(cur))
        for k in range(i, len(atoms)):
            a, wa = atoms[k]
            if w + wa > max_weight:
                continue
            cur.append(a)
            rec(k + 1 if eng.apar(a) else k, cur, w + wa)
            cur.pop()
    rec(0, [], Fraction(0))
    return out


def monomial_state(P, m, c=ONE):
    return F.State(P, {m: c})
