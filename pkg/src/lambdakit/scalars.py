"""Exact scalars: Gaussian rationals and polynomials in constant symbols.

Numbers are elements of sympy's ``QQ_I`` domain (gmpy2-backed when
available).  ``CPoly`` adds named constant symbols (metric entries,
structure constants, ...).  Engine code mixes both freely: a ``CPoly``
that collapses to a number is demoted back to ``QQ_I``.
"""
import re
from fractions import Fraction

from sympy.polys.domains import QQ, QQ_I

ZERO = QQ_I(0)
ONE = QQ_I(1)
I = QQ_I(0, 1)
HALF = QQ_I(QQ(1, 2))

GaussQ = type(ONE)


def num(x):
    """Coerce int / Fraction / str / QQ_I into an exact scalar."""
    if isinstance(x, (GaussQ, CPoly)):
        return x
    if isinstance(x, bool):
        x = int(x)
    if isinstance(x, int):
        return QQ_I(x)
    if isinstance(x, Fraction):
        return QQ_I(QQ(x.numerator, x.denominator))
    if isinstance(x, str):
        return parse_number(x)
    if isinstance(x, complex):
        raise TypeError("floating point values are not accepted")
    try:
        return QQ_I(QQ(x))
    except Exception:
        pass
    return QQ_I.from_sympy(x)


def q(p, r=1):
    return QQ_I(QQ(p, r))


def is_number(c):
    return isinstance(c, GaussQ)


def conj(c):
    if isinstance(c, GaussQ):
        return QQ_I(c.x, -c.y)
    return c.conjugate()


_NUM_RE = re.compile(r"^\s*([+-]?\d+(?:/\d+)?)?\s*(?:([+-])\s*(\d+(?:/\d+)?)?\s*\*?\s*i)?\s*$")


def _frac(s):
    if "/" in s:
        a, b = s.split("/")
        return QQ(int(a), int(b))
    return QQ(int(s))


def parse_number(s):
    """Parse ``p/q``, ``p/q + r/s*i``, ``i``, ``-3*i``."""
    s = s.strip()
    m = re.fullmatch(r"([+-]?)\s*(\d+(?:/\d+)?)?\s*\*?\s*i", s)
    if m:
        v = _frac(m.group(2)) if m.group(2) else QQ(1)
        return QQ_I(0, -v if m.group(1) == "-" else v)
    m = _NUM_RE.match(s)
    if not m or not s:
        raise ValueError("not an exact number: %r" % s)
    re_part = _frac(m.group(1)) if m.group(1) else QQ(0)
    im_part = QQ(0)
    if m.group(2):
        im_part = _frac(m.group(3)) if m.group(3) else QQ(1)
        if m.group(2) == "-":
            im_part = -im_part
    return QQ_I(re_part, im_part)


def render_number(c):
    a, b = c.x, c.y
    if b == 0:
        return str(a)
    if a == 0:
        if b == 1:
            return "i"
        if b == -1:
            return "-i"
        return "%s*i" % b
    sign = "+" if b > 0 else "-"
    mag = abs(b)
    return "(%s %s %s)" % (a, sign, "i" if mag == 1 else "%s*i" % mag)


def to_fraction_pair(c):
    return (Fraction(int(c.x.numerator), int(c.x.denominator)),
            Fraction(int(c.y.numerator), int(c.y.denominator)))


class CPoly:
    """Polynomial over QQ_I in commuting, even, constant symbols.

    Monomials are sorted tuples of ``(name, power)``.
    """
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = terms or {}

    @staticmethod
    def symbol(name):
        return CPoly({((name, 1),): ONE})

    @staticmethod
    def const(c):
        c = num(c)
        return CPoly({(): c} if c else {})

    @staticmethod
    def wrap(c):
        return c if isinstance(c, CPoly) else CPoly.const(c)

    def demote(self):
        if not self.terms:
            return ZERO
        if len(self.terms) == 1 and () in self.terms:
            return self.terms[()]
        return self

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, CPoly):
            return self.terms == other.terms
        try:
            other = num(other)
        except (TypeError, ValueError, AttributeError):
            return False
        return self.demote() == other if isinstance(self.demote(), GaussQ) else False

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __neg__(self):
        return CPoly({m: -c for m, c in self.terms.items()})

    def __add__(self, other):
        if not isinstance(other, CPoly):
            other = CPoly.const(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, ZERO) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return CPoly(out).demote()

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-CPoly.wrap(other))

    def __rsub__(self, other):
        return CPoly.wrap(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, CPoly):
            other = num(other)
            if not other:
                return ZERO
            return CPoly({m: c * other for m, c in self.terms.items()})
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                v = out.get(m, ZERO) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return CPoly(out).demote()

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = num(other)
        return CPoly({m: c / other for m, c in self.terms.items()})

    def __pow__(self, k):
        out = CPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def symbols(self):
        return sorted({n for m in self.terms for n, _ in m})

    def conjugate(self):
        # constant symbols are treated as real unless renamed by the caller
        return CPoly({m: conj(c) for m, c in self.terms.items()})

    def subs(self, table):
        """Substitute symbols by scalars/CPolys (relation packs)."""
        out = ZERO
        for m, c in self.terms.items():
            t = CPoly.const(c)
            for name, p in m:
                if name in table:
                    t = t * (num_or_poly(table[name]) ** p)
                else:
                    t = t * (CPoly.symbol(name) ** p)
            out = out + t
        return out

    def __repr__(self):
        return "CPoly(%s)" % render_coeff(self)


def num_or_poly(x):
    return x if isinstance(x, CPoly) else num(x)


def _mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for n, p in m2:
        d[n] = d.get(n, 0) + p
    return tuple(sorted(d.items()))


def subs_coeff(c, table):
    if isinstance(c, CPoly) and table:
        return c.subs(table)
    return c


def render_coeff(c):
    if isinstance(c, GaussQ):
        return render_number(c)
    parts = []
    for m in sorted(c.terms, key=lambda m: (len(m), m)):
        v = c.terms[m]
        mono = "*".join(n if p == 1 else "%s^%d" % (n, p) for n, p in m)
        if not mono:
            parts.append(render_number(v))
        elif v == ONE:
            parts.append(mono)
        elif v == -ONE:
            parts.append("-" + mono)
        else:
            parts.append("%s*%s" % (render_number(v), mono))
    return "(" + " + ".join(parts) + ")" if len(parts) > 1 else parts[0]


def factorial(n):
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def binom(n, k):
    """Generalized binomial coefficient C(n, k) for integer n, k >= 0."""
    out = Fraction(1)
    for i in range(k):
        out = out * (n - i) / (i + 1)
    return int(out)
