"""Arithmetic in the algebra generated by an even central lambda and an odd chi.

A monomial over variables ``Λ1, Λ2, ...`` is written
``λ1^j1 χ1^J1 λ2^j2 χ2^J2 ... c`` with the odd parts in variable order and
the coefficient ``c`` on the far right.  Only ``J in {0, 1}`` is stored
because ``χ^2 = -λ``.

Coefficients are opaque: anything supporting ``+``, ``-``, scalar ``*``
and truthiness.  Operations that need more (a coefficient product, the
translation operators S/T, coefficient parity) take them as callables.
"""
import itertools
import operator

from .scalars import ONE, ZERO, binom, factorial, num, q

_fresh = itertools.count()


class LambdaVar:
    __slots__ = ("tag", "even", "odd")

    def __init__(self, even="lam", odd="chi", tag=None):
        self.tag = next(_fresh) if tag is None else tag
        self.even = even
        self.odd = odd

    @classmethod
    def fresh(cls, even="gam", odd="eta"):
        return cls(even, odd)

    def __eq__(self, other):
        return isinstance(other, LambdaVar) and self.tag == other.tag

    def __hash__(self):
        return hash(("LambdaVar", self.tag))

    def __repr__(self):
        return "Λ(%s,%s)#%s" % (self.even, self.odd, self.tag)


LAM = LambdaVar("lam", "chi", tag="Lambda")
GAM = LambdaVar("gam", "eta", tag="Gamma")


def _zero_parity(c):
    return 0


class HPoly:
    """Element of H^{⊗k} ⊗ R: finite map exponent-tuple -> coefficient."""
    __slots__ = ("vars", "terms")

    def __init__(self, vars, terms=None):
        self.vars = tuple(vars)
        self.terms = {}
        for k, c in (terms or {}).items():
            if c:
                self.terms[k] = c

    @classmethod
    def constant(cls, c, vars=(LAM,)):
        return cls(vars, {((0, 0),) * len(vars): c})

    @classmethod
    def monomial(cls, exps, c=ONE, vars=(LAM,)):
        exps = tuple(exps)
        if exps and not isinstance(exps[0], tuple):
            exps = (exps,)
        return _normalize(cls(vars), exps, c)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, HPoly) and self.vars == other.vars and self.terms == other.terms

    def __add__(self, other):
        _check_vars(self, other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            if k in out:
                v = out[k] + c
                if v:
                    out[k] = v
                else:
                    del out[k]
            else:
                out[k] = c
        return HPoly(self.vars, out)

    def __neg__(self):
        return HPoly(self.vars, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        s = num(s)
        return HPoly(self.vars, {k: c * s for k, c in self.terms.items()})

    def map(self, f):
        return HPoly(self.vars, {k: f(c) for k, c in self.terms.items()})

    def coefficient(self, exps):
        return self.terms.get(tuple(exps))

    def __repr__(self):
        return "HPoly(%s)" % render_hpoly(self)


def _check_vars(p, r):
    if p.vars != r.vars:
        raise ValueError("HPoly variable mismatch: %r vs %r" % (p.vars, r.vars))


def _normalize(p, exps, c):
    """Add one monomial whose odd degree may exceed one (χ^2 = -λ)."""
    sign = ONE
    key = []
    for (j, J) in exps:
        # χ^(2k+r) = (−λ)^k χ^r
        if J >= 2:
            j += J // 2
            if (J // 2) % 2:
                sign = -sign
            J = J % 2
        key.append((j, J))
    return p + HPoly(p.vars, {tuple(key): c * sign if sign != ONE else c})


def hpoly_mul(p, r, mul=operator.mul, parity=_zero_parity):
    """Graded-commutative product.

    ``(m1 c1)(m2 c2) = ± m1 m2 (c1 c2)``: c1 passes the odd part of m2
    (Koszul sign), then odd variables are reordered and χ_i χ_i = -λ_i.
    """
    _check_vars(p, r)
    out = HPoly(p.vars)
    n = len(p.vars)
    for k1, c1 in p.terms.items():
        pc1 = parity(c1)
        for k2, c2 in r.terms.items():
            odd2 = sum(J for _, J in k2)
            sign = -1 if (pc1 and odd2 % 2) else 1
            key = []
            # move each odd factor of m2 left past the remaining odd factors of m1
            for i in range(n):
                j1, J1 = k1[i]
                j2, J2 = k2[i]
                if J2:
                    later = sum(k1[t][1] for t in range(i + 1, n))
                    if later % 2:
                        sign = -sign
                if J1 and J2:
                    sign = -sign
                    key.append((j1 + j2 + 1, 0))
                else:
                    key.append((j1 + j2, J1 + J2))
            c = mul(c1, c2)
            if sign < 0:
                c = -c
            out = out + HPoly(p.vars, {tuple(key): c})
    return out


def integrate_gamma(p, gam, lam):
    """∫_0^Λ p dΓ: ∂_η (left derivative) then ∫_0^λ dγ; Γ is eliminated."""
    if gam not in p.vars:
        return HPoly([v for v in p.vars if v != gam] or [lam])
    gi = p.vars.index(gam)
    rest = [v for v in p.vars if v != gam]
    if lam not in rest:
        rest.append(lam)
    li = rest.index(lam)
    out = HPoly(rest)
    for key, c in p.terms.items():
        k, K = key[gi]
        if not K:
            continue
        sign = -1 if sum(key[t][1] for t in range(gi)) % 2 else 1
        newkey = [e for t, e in enumerate(key) if t != gi]
        if len(newkey) < len(rest):
            newkey.append((0, 0))
        j, J = newkey[li]
        newkey[li] = (j + k + 1, J)
        # odd part of lam keeps its place; only the even degree moves
        val = c * q(sign, k + 1)
        out = out + HPoly(rest, {tuple(newkey): val})
    return out


def substitute_skew(p, gam, lam, S, T):
    """Replace Γ by (-λ - T, -χ - S) acting on the coefficients.

    Γ must be the last variable of ``p`` so that the substituted odd part
    sits directly next to the coefficient.  ``S`` and ``T`` act on
    coefficients.  The result has Γ replaced by ``lam`` in place.
    """
    if gam not in p.vars:
        return HPoly([lam if v == gam else v for v in p.vars], dict(p.terms))
    gi = p.vars.index(gam)
    if gi != len(p.vars) - 1:
        raise ValueError("skew substitution needs Γ in last position")
    if lam in p.vars:
        raise ValueError("target variable already present")
    newvars = list(p.vars)
    newvars[gi] = lam
    out = HPoly(newvars)
    for key, c in p.terms.items():
        k, K = key[gi]
        prefix = key[:gi]
        # (-χ - S)^K c  ->  list of (J, coefficient)
        base = [(0, c)] if not K else [(1, -c), (0, -S(c))]
        for J, cc in base:
            for i in range(k + 1):
                # C(k,i) (-λ)^(k-i) (-T)^i
                t = cc
                for _ in range(i):
                    t = T(t)
                if not t:
                    continue
                coef = binom(k, i) * (-1) ** k
                out = out + HPoly(newvars, {prefix + ((k - i, J),): t * num(coef)})
    return out


def mode_extract(p, j, J, zero=ZERO):
    """j! times the coefficient of λ^j χ^J in a one-variable HPoly."""
    if len(p.vars) != 1:
        raise ValueError("mode_extract expects a single Λ variable")
    c = p.terms.get(((j, J),))
    if c is None:
        return zero
    return c * num(factorial(j))


def reassemble(modes, vars=(LAM,)):
    """Inverse of mode_extract: Σ Λ^{j|J}/j! · modes[(j, J)]."""
    out = HPoly(vars)
    for (j, J), c in modes.items():
        out = out + HPoly(vars, {((j, J),): c * q(1, factorial(j))})
    return out


def render_hpoly(p, render=str):
    if not p.terms:
        return "0"
    parts = []
    for key in sorted(p.terms):
        mono = []
        for v, (j, J) in zip(p.vars, key):
            if j:
                mono.append(v.even if j == 1 else "%s^%d" % (v.even, j))
            if J:
                mono.append(v.odd)
        c = render(p.terms[key])
        parts.append("*".join(mono + ["(%s)" % c]) if mono else c)
    return " + ".join(parts)
