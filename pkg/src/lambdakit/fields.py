"""Field expressions: AST, canonical states and rendering.

The AST (``Gen``, ``Vac``, ``S``, ``T``, ``NO``, ``CoeffMul``, ``Sum``) is
what users write.  ``State`` is the canonical form produced by the engine:
a finite sum of scalar multiples of right-nested normally ordered chains
of decorated generators ``S^s T^t g`` sorted by generator declaration
order, then decoration depth.

The module-level ``apply_S``, ``apply_T``, ``normal_order`` and
``reassociate`` take a presentation and return canonical ``State``s.
"""
from dataclasses import dataclass
from fractions import Fraction

from .scalars import ONE, ZERO, num, render_coeff


class FieldExpr:
    def __add__(self, other):
        return Sum((self, as_expr(other)))

    def __radd__(self, other):
        return Sum((as_expr(other), self))

    def __sub__(self, other):
        return Sum((self, CoeffMul(-ONE, as_expr(other))))

    def __neg__(self):
        return CoeffMul(-ONE, self)

    def __mul__(self, other):
        if isinstance(other, FieldExpr):
            return NO(self, other)
        return CoeffMul(num(other), self)

    def __rmul__(self, other):
        return CoeffMul(num(other), self)

    def __str__(self):
        return render_expr(self)


@dataclass(frozen=True)
class Gen(FieldExpr):
    name: str


@dataclass(frozen=True)
class Vac(FieldExpr):
    pass


@dataclass(frozen=True)
class S(FieldExpr):
    child: FieldExpr


@dataclass(frozen=True)
class T(FieldExpr):
    child: FieldExpr


@dataclass(frozen=True)
class NO(FieldExpr):
    left: FieldExpr
    right: FieldExpr


@dataclass(frozen=True, eq=False)
class CoeffMul(FieldExpr):
    coeff: object
    child: FieldExpr

    def __eq__(self, other):
        return (isinstance(other, CoeffMul) and self.child == other.child
                and render_coeff(self.coeff) == render_coeff(other.coeff))

    def __hash__(self):
        return hash(("CoeffMul", render_coeff(self.coeff), self.child))


@dataclass(frozen=True)
class Sum(FieldExpr):
    children: tuple


def as_expr(x):
    if isinstance(x, FieldExpr):
        return x
    if isinstance(x, State):
        return x.to_expr()
    return CoeffMul(num(x), Vac())


def no_chain(*items):
    """Right-nested product a(b(c ...))."""
    items = [as_expr(x) for x in items]
    out = items[-1]
    for x in reversed(items[:-1]):
        out = NO(x, out)
    return out


def parity(e, P):
    if isinstance(e, Gen):
        return P.parity(e.name)
    if isinstance(e, Vac):
        return 0
    if isinstance(e, S):
        return 1 - parity(e.child, P)
    if isinstance(e, T):
        return parity(e.child, P)
    if isinstance(e, NO):
        return (parity(e.left, P) + parity(e.right, P)) % 2
    if isinstance(e, CoeffMul):
        return parity(e.child, P)
    if isinstance(e, Sum):
        ps = {parity(c, P) for c in e.children}
        if len(ps) > 1:
            raise ValueError("inhomogeneous sum has no parity")
        return ps.pop() if ps else 0
    raise TypeError(e)


def weight(e, P):
    if isinstance(e, Gen):
        return P.weight(e.name)
    if isinstance(e, Vac):
        return Fraction(0)
    if isinstance(e, S):
        return weight(e.child, P) + Fraction(1, 2)
    if isinstance(e, T):
        return weight(e.child, P) + 1
    if isinstance(e, NO):
        return weight(e.left, P) + weight(e.right, P)
    if isinstance(e, CoeffMul):
        return weight(e.child, P)
    if isinstance(e, Sum):
        return max((weight(c, P) for c in e.children), default=Fraction(0))
    raise TypeError(e)


def substitute(e, table):
    """Replace generators by expressions according to ``table``."""
    if isinstance(e, Gen):
        return table.get(e.name, e)
    if isinstance(e, Vac):
        return e
    if isinstance(e, S):
        return S(substitute(e.child, table))
    if isinstance(e, T):
        return T(substitute(e.child, table))
    if isinstance(e, NO):
        return NO(substitute(e.left, table), substitute(e.right, table))
    if isinstance(e, CoeffMul):
        return CoeffMul(e.coeff, substitute(e.child, table))
    if isinstance(e, Sum):
        return Sum(tuple(substitute(c, table) for c in e.children))
    raise TypeError(e)


# ---------------------------------------------------------------- rendering

def _render_atomic(e):
    s = render_expr(e)
    if isinstance(e, (Gen, Vac)):
        return s
    return "(" + s + ")"


def render_expr(e):
    if isinstance(e, Gen):
        return e.name
    if isinstance(e, Vac):
        return "vac"
    if isinstance(e, S):
        return "S " + _render_atomic(e.child)
    if isinstance(e, T):
        return "T " + _render_atomic(e.child)
    if isinstance(e, NO):
        left = render_expr(e.left)
        if not isinstance(e.left, (Gen, Vac, S, T)):
            left = "(" + left + ")"
        right = render_expr(e.right)
        if isinstance(e.right, (Sum, CoeffMul)):
            right = "(" + right + ")"
        return left + "*" + right
    if isinstance(e, CoeffMul):
        c = render_coeff(e.coeff)
        inner = render_expr(e.child)
        if isinstance(e.child, Sum):
            inner = "(" + inner + ")"
        if c.startswith("-") and not c.startswith("(") and " " in c:
            c = "(" + c + ")"
        return c + "*" + inner
    if isinstance(e, Sum):
        if not e.children:
            return "0"
        return " + ".join(render_expr(c) for c in e.children)
    raise TypeError(e)


def render_atom(name, s, t):
    out = name
    if t == 1:
        out = "T " + out
    elif t > 1:
        out = "T^%d %s" % (t, out)
    if s:
        out = "S " + out
    return out


def atom_expr(name, s, t):
    e = Gen(name)
    for _ in range(t):
        e = T(e)
    if s:
        e = S(e)
    return e


class State:
    """Canonical element: {monomial: scalar} over a presentation.

    A monomial is a tuple of atoms ``(gid, s, t)``; the empty tuple is the
    vacuum.
    """
    __slots__ = ("P", "terms")

    def __init__(self, P, terms=None):
        self.P = P
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, State):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, ZERO) + c
        return State(self.P, out)

    def __neg__(self):
        return State(self.P, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        s = num(s)
        return State(self.P, {m: c * s for m, c in self.terms.items()})

    __rmul__ = __mul__

    def coefficient(self, mono=()):
        return self.terms.get(mono, ZERO)

    def scalar_part(self):
        return self.terms.get((), ZERO)

    def to_expr(self):
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            if m:
                e = no_chain(*[atom_expr(self.P.gen_names[g], s, t) for g, s, t in m])
            else:
                e = Vac()
            parts.append(e if c == ONE else CoeffMul(c, e))
        if len(parts) == 1:
            return parts[0]
        return Sum(tuple(parts))

    def render(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            mono = "*".join(render_atom(self.P.gen_names[g], s, t) for g, s, t in m)
            cs = render_coeff(c)
            if not mono:
                parts.append(cs)
            elif c == ONE:
                parts.append(mono)
            elif c == -ONE:
                parts.append("-" + mono)
            else:
                parts.append(cs + "*" + mono)
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return "State(%s)" % self.render()

    __str__ = render


# -------------------------------------------------- module-level operations

def apply_S(e, P):
    eng = P.engine()
    return eng.wrap(eng.S_state(eng.canon(e)))


def apply_T(e, P):
    eng = P.engine()
    return eng.wrap(eng.T_state(eng.canon(e)))


def normal_order(a, b, P):
    eng = P.engine()
    return eng.wrap(eng.no_states(eng.canon(a), eng.canon(b)))


def canonical(e, P):
    eng = P.engine()
    return eng.wrap(eng.canon(e))


def reassociate(e, P):
    """Rewrite a left-nested product ((a b) c) as a(bc) plus the
    quasi-associativity corrections; returns the canonical result."""
    if not (isinstance(e, NO) and isinstance(e.left, NO)):
        return canonical(e, P)
    eng = P.engine()
    a = eng.canon(e.left.left)
    b = eng.canon(e.left.right)
    c = eng.canon(e.right)
    return eng.wrap(eng.reassociate_states(a, b, c))
