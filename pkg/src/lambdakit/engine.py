"""Λ-bracket evaluation over a presentation.

Internal representation:

* atom      ``(gid, s, t)`` stands for ``S^s T^t g`` with ``s in {0, 1}``;
* monomial  tuple of atoms, the right-nested product ``a1(a2(... an))``;
  canonical when atoms are non-decreasing and odd atoms do not repeat;
* state     dict ``{monomial: scalar}``;
* lpoly     dict ``{(j, J): state}`` meaning ``Σ λ^j χ^J state``.

Generator ids follow the canonical order: function generators first, then
fields in declaration order.
"""
from collections import Counter
from fractions import Fraction

from . import fields as F
from .lambda_core import LAM, HPoly
from .scalars import ONE, binom, factorial, num, q, subs_coeff

VAC = ()


class MissingBracket(KeyError):
    pass


class NonCanonicalInput(ValueError):
    pass


def _sgn(e):
    return -ONE if e % 2 else ONE


def st_add(acc, st, c=ONE):
    for m, v in st.items():
        if c is not ONE:
            v = v * c
        w = acc.get(m)
        w = v if w is None else w + v
        if w:
            acc[m] = w
        else:
            acc.pop(m, None)
    return acc


def lp_add(acc, lp, c=ONE):
    for k, st in lp.items():
        cur = acc.get(k)
        if cur is None:
            cur = acc[k] = {}
        st_add(cur, st, c)
        if not cur:
            del acc[k]
    return acc


def lp_add_term(acc, key, st, c=ONE):
    cur = acc.get(key)
    if cur is None:
        cur = acc[key] = {}
    st_add(cur, st, c)
    if not cur:
        del acc[key]


def lp_chi(lp):
    """Left multiplication by χ."""
    out = {}
    for (j, J), st in lp.items():
        if J:
            lp_add_term(out, (j + 1, 0), st, -ONE)
        else:
            lp_add_term(out, (j, 1), st)
    return out


def lp_lam(lp, k=1):
    return {(j + k, J): dict(st) for (j, J), st in lp.items()}


class Engine:
    def __init__(self, P):
        self.P = P
        names = P.gen_names
        self.n = len(names)
        self.gpar = [P.parity(nm) for nm in names]
        self.gid = {nm: i for i, nm in enumerate(names)}
        self.relations = dict(P.relations)
        self._table = {}
        self._br = {}
        self._ins = {}
        self._no = {}
        self._T = {}
        self._S = {}
        self._busy = set()
        self.rules = Counter()

    # ------------------------------------------------------------ basics

    def apar(self, a):
        return self.gpar[a[0]] ^ a[1]

    def mpar(self, m):
        p = 0
        for a in m:
            p ^= self.gpar[a[0]] ^ a[1]
        return p

    def wrap(self, st):
        return F.State(self.P, st)

    def hwrap(self, lp, var=LAM):
        return HPoly((var,), {((j, J),): self.wrap(st) for (j, J), st in lp.items()})

    def is_canonical(self, m):
        for x, y in zip(m, m[1:]):
            if x > y or (x == y and self.apar(x)):
                return False
        return True

    # ------------------------------------------------------------ input

    def canon(self, e):
        """FieldExpr / State / scalar -> canonical state dict."""
        if isinstance(e, F.State):
            if e.P is not self.P and e.P.gen_names != self.P.gen_names:
                raise ValueError("state belongs to a different presentation")
            return {m: subs_coeff(c, self.relations) for m, c in e.terms.items() if c}
        if isinstance(e, dict):
            return e
        if not isinstance(e, F.FieldExpr):
            c = num(e)
            return {VAC: c} if c else {}
        if isinstance(e, F.Gen):
            if e.name not in self.gid:
                raise MissingBracket("undeclared generator %r" % e.name)
            return {((self.gid[e.name], 0, 0),): ONE}
        if isinstance(e, F.Vac):
            return {VAC: ONE}
        if isinstance(e, F.S):
            return self.S_state(self.canon(e.child))
        if isinstance(e, F.T):
            return self.T_state(self.canon(e.child))
        if isinstance(e, F.NO):
            return self.no_states(self.canon(e.left), self.canon(e.right))
        if isinstance(e, F.CoeffMul):
            c = subs_coeff(e.coeff, self.relations)
            if isinstance(c, F.FieldExpr):
                raise TypeError("coefficient must be a scalar")
            return st_add({}, self.canon(e.child), c)
        if isinstance(e, F.Sum):
            out = {}
            for ch in e.children:
                st_add(out, self.canon(ch))
            return out
        raise TypeError("not a field expression: %r" % (e,))

    # ------------------------------------------------------------ S and T

    def build(self, atoms):
        """Canonical form of a right-nested product of the given atoms."""
        atoms = tuple(atoms)
        if self.is_canonical(atoms):
            return {atoms: ONE}
        st = {VAC: ONE}
        for a in reversed(atoms):
            out = {}
            for m, c in st.items():
                st_add(out, self.insert(a, m), c)
            st = out
        return st

    def T_mono(self, m):
        r = self._T.get(m)
        if r is not None:
            return r
        out = {}
        for i, (g, s, t) in enumerate(m):
            st_add(out, self.build(m[:i] + ((g, s, t + 1),) + m[i + 1:]))
        self._T[m] = out
        return out

    def S_mono(self, m):
        r = self._S.get(m)
        if r is not None:
            return r
        out = {}
        sign = ONE
        for i, a in enumerate(m):
            g, s, t = a
            na = (g, 1, t) if s == 0 else (g, 0, t + 1)
            st_add(out, self.build(m[:i] + (na,) + m[i + 1:]), sign)
            if self.apar(a):
                sign = -sign
        self._S[m] = out
        return out

    def T_state(self, st):
        out = {}
        for m, c in st.items():
            st_add(out, self.T_mono(m), c)
        return out

    def S_state(self, st):
        out = {}
        for m, c in st.items():
            st_add(out, self.S_mono(m), c)
        return out

    def T_pow(self, st, k):
        for _ in range(k):
            st = self.T_state(st)
        return st

    def lp_S(self, lp):
        """S applied from the left to Σ λ^j χ^J X.

        S and χ do not supercommute: S χ = -χ S + 2λ, which is what makes
        (S + χ)^2 = T + λ agree with [a_Λ Tb] = (λ + T)[a_Λ b].
        """
        out = {}
        for (j, J), st in lp.items():
            if J:
                lp_add_term(out, (j, 1), self.S_state(st), -ONE)
                lp_add_term(out, (j + 1, 0), st, 2 * ONE)
            else:
                lp_add_term(out, (j, 0), self.S_state(st))
        return out

    def lp_T(self, lp):
        out = {}
        for k, st in lp.items():
            lp_add_term(out, k, self.T_state(st))
        return out

    # ------------------------------------------------------------ products

    def insert(self, a, m):
        key = (a, m)
        r = self._ins.get(key)
        if r is not None:
            return r
        r = self._insert(a, m)
        self._ins[key] = r
        return r

    def _insert(self, a, m):
        if not m:
            return {(a,): ONE}
        b = m[0]
        if a < b:
            return {(a,) + m: ONE}
        pa = self.apar(a)
        if a == b:
            if not pa:
                return {(a,) + m: ONE}
            half = self.qc_integral((a,), (a,))
            return self.no_state_mono(st_add({}, half, q(1, 2)), m[1:])
        # a > b:  a(b r) = ±b(a r) ± qa(b,a,r) + (∫[a_Λ b]) r - qa(a,b,r)
        r = m[1:]
        pb = self.apar(b)
        sgn = _sgn(pa * pb)
        out = {}
        for x, c in self.insert(a, r).items():
            st_add(out, self.insert(b, x), c * sgn)
        st_add(out, self.qa((b,), (a,), r), sgn)
        st_add(out, self.no_state_mono(self.qc_integral((a,), (b,)), r))
        st_add(out, self.qa((a,), (b,), r), -ONE)
        return out

    def no(self, m1, m2):
        if not m1:
            return {m2: ONE}
        if not m2:
            return {m1: ONE}
        if len(m1) == 1:
            return self.insert(m1[0], m2)
        key = (m1, m2)
        r = self._no.get(key)
        if r is not None:
            return r
        a, rest = m1[:1], m1[1:]
        out = {}
        for x, c in self.no(rest, m2).items():
            st_add(out, self.insert(a[0], x), c)
        st_add(out, self.qa(a, rest, m2))
        self._no[key] = out
        return out

    def no_state_mono(self, st, m):
        out = {}
        for x, c in st.items():
            st_add(out, self.no(x, m), c)
        return out

    def no_states(self, s1, s2):
        out = {}
        for x, c in s1.items():
            for y, d in s2.items():
                st_add(out, self.no(x, y), c * d)
        return out

    def qa(self, x, y, r):
        """Quasi-associativity correction ((x y) r) - x(y r) for monomials."""
        out = {}
        if not r:
            return out
        pxy = self.mpar(x) * self.mpar(y)
        for first, second, sign in ((x, y, ONE), (y, x, _sgn(pxy))):
            br = self.bracket(second, r)
            for (j, J), st in br.items():
                if not J:
                    continue
                # first_{(-j-2|1)} (second_{(j|1)} r)
                pos = st_add({}, st, num(factorial(j)))
                neg = self.T_pow({first: ONE}, j + 1)
                st_add(out, self.no_states(neg, pos), sign * q(1, factorial(j + 1)))
        return out

    def qc_integral(self, m1, m2):
        """∫_{-∇}^0 [m1_Λ m2] dΛ."""
        out = {}
        for (j, J), st in self.bracket(m1, m2).items():
            if J:
                st_add(out, self.T_pow(st, j + 1), _sgn(j) * q(1, j + 1))
        return out

    # ------------------------------------------------------------ brackets

    def table(self, g1, g2):
        key = (g1, g2)
        r = self._table.get(key)
        if r is not None:
            return r
        if key in self._busy:
            raise RecursionError("cyclic bracket table entry %r" % (key,))
        self._busy.add(key)
        try:
            n1, n2 = self.P.gen_names[g1], self.P.gen_names[g2]
            raw = self.P.declared_bracket(n1, n2)
            lp = {}
            if raw is not None:
                for (j, J), e in raw.items():
                    lp_add_term(lp, (j, J), self.canon(e))
            elif self.P.declared_bracket(n2, n1) is not None:
                rev = {}
                for (j, J), e in self.P.declared_bracket(n2, n1).items():
                    lp_add_term(rev, (j, J), self.canon(e))
                lp = self.skew(rev, _sgn(self.gpar[g1] * self.gpar[g2]))
        finally:
            self._busy.discard(key)
        self._table[key] = lp
        return lp

    def br_atoms(self, a, b):
        g1, s1, t1 = a
        g2, s2, t2 = b
        lp = self.table(g1, g2)
        if s2:
            # [a_Λ Sb] = -(-1)^a (S + χ)[a_Λ b]
            s = -ONE if not self.gpar[g1] else ONE
            x = lp_add(self.lp_S(lp), lp_chi(lp))
            lp = {k: st_add({}, v, s) for k, v in x.items()}
        for _ in range(t2):
            lp = lp_add(lp_lam(lp), self.lp_T(lp))
        if t1:
            lp = {k: st_add({}, v, _sgn(t1)) for k, v in lp_lam(lp, t1).items()}
        if s1:
            lp = lp_chi(lp)
        return lp

    def bracket(self, m1, m2):
        if not m1 or not m2:
            return {}
        key = (m1, m2)
        r = self._br.get(key)
        if r is not None:
            return r
        if len(m2) >= 2:
            self.rules["wick"] += 1
            r = self._wick(m1, m2)
        elif len(m1) == 1:
            self.rules["generator"] += 1
            r = self.br_atoms(m1[0], m2[0])
        else:
            self.rules["skew"] += 1
            r = self.skew(self.bracket(m2, m1), _sgn(self.mpar(m1) * self.mpar(m2)))
        self._br[key] = r
        return r

    def skew(self, lp, sign=ONE):
        """Σ γ^k η^K X  ->  sign · Σ (-λ-T)^k (-χ-S)^K X."""
        out = {}
        for (k, K), st in lp.items():
            if K:
                parts = [((1, ), st_add({}, st, -ONE)), ((0, ), st_add({}, self.S_state(st), -ONE))]
            else:
                parts = [((0, ), st)]
            for (J, ), x in parts:
                y = x
                for i in range(k + 1):
                    if i:
                        y = self.T_state(y)
                    if not y:
                        break
                    c = num(binom(k, i)) * _sgn(k) * sign
                    lp_add_term(out, (k - i, J), y, c)
        return out

    def _wick(self, m1, m2):
        b, c = m2[:1], m2[1:]
        pa = self.mpar(m1)
        pb = self.apar(b[0])
        out = {}
        A = self.bracket(m1, b)
        for key, st in A.items():
            lp_add_term(out, key, self.no_state_mono(st, c))
        sgn = _sgn((pa + 1) * pb)
        for (j, J), st in self.bracket(m1, c).items():
            ins = {}
            for x, v in st.items():
                st_add(ins, self.insert(b[0], x), v)
            lp_add_term(out, (j, J), ins, sgn * _sgn(pb * J))
        # ∫_0^Λ [[a_Λ b]_Γ c] dΓ: χ^J leaving the odd bracket costs (-1)^J,
        # ∂_η passing χ^J costs it again, so no net sign
        for (j, J), st in A.items():
            for x, v in st.items():
                for (k, K), e in self.bracket(x, c).items():
                    if K:
                        lp_add_term(out, (j + k + 1, J), e, v * q(1, k + 1))
        return out

    def bracket_states(self, s1, s2):
        out = {}
        for x, c in s1.items():
            for y, d in s2.items():
                lp_add(out, self.bracket(x, y), c * d)
        return out

    # ------------------------------------------------------------ checks

    def state_parity(self, st):
        ps = {self.mpar(m) for m in st}
        if len(ps) > 1:
            raise ValueError("inhomogeneous state")
        return ps.pop() if ps else 0

    def skew_residual(self, s1, s2):
        pa, pb = self.state_parity(s1), self.state_parity(s2)
        lhs = self.bracket_states(s1, s2)
        rhs = self.skew(self.bracket_states(s2, s1), _sgn(pa * pb))
        return lp_add(lhs, rhs, -ONE)

    def jacobi_residual(self, sa, sb, sc):
        """Residual in H⊗H, keys ((j,J),(k,K)) for λ^j χ^J γ^k η^K."""
        pa, pb = self.state_parity(sa), self.state_parity(sb)
        out = {}

        def add(key, st, c):
            lp_add_term(out, key, st, c)

        # [a_Λ [b_Γ c]]
        for (k, K), x in self.bracket_states(sb, sc).items():
            for (j, J), y in self.bracket_states(sa, x).items():
                add(((j, J), (k, K)), y, _sgn((pa + 1) * K + J * K))
        # (-1)^a [[a_Λ b]_{Γ+Λ} c], with χ^J pulled out of the odd bracket
        for (j, J), x in self.bracket_states(sa, sb).items():
            for (m, M), y in self.bracket_states(x, sc).items():
                for i in range(m + 1):
                    c0 = num(binom(m, i)) * _sgn(pa + J)
                    lam = j + m - i
                    if not M:
                        add(((lam, J), (i, 0)), y, c0)
                    else:
                        add(((lam, J), (i, 1)), y, c0)
                        if J:
                            add(((lam + 1, 0), (i, 0)), y, -c0)
                        else:
                            add(((lam, 1), (i, 0)), y, c0)
        # -(-1)^{(a+1)(b+1)} [b_Γ [a_Λ c]]
        s3 = -_sgn((pa + 1) * (pb + 1))
        for (j, J), x in self.bracket_states(sa, sc).items():
            for (k, K), y in self.bracket_states(sb, x).items():
                add(((j, J), (k, K)), y, s3 * _sgn((pb + 1) * J))
        return out

    def reassociate_states(self, sa, sb, sc):
        """Canonical ((a b) c) computed by quasi-associativity from a(bc)."""
        out = {}
        for x, c1 in sa.items():
            for y, c2 in sb.items():
                for z, c3 in sc.items():
                    c = c1 * c2 * c3
                    for w, v in self.no(y, z).items():
                        st_add(out, self.no(x, w), c * v)
                    st_add(out, self.qa(x, y, z), c)
        return out


def weight_of_mono(P, m):
    w = Fraction(0)
    for g, s, t in m:
        w += P.gen_weight(g) + Fraction(s, 2) + t
    return w
