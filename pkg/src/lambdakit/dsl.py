"""Text scripts: declarations of symbols, generators, brackets, fields and
checks.  See docs/grammar.ebnf.

``parse`` never raises anything but ``ScriptError``; ``render`` produces
text that parses back to an equal AST; ``build`` turns a script into a
presentation plus named fields.
"""
import re
from dataclasses import dataclass, field
from fractions import Fraction

from . import fields as F
from . import presentations as PR
from .presentation import Presentation
from .scalars import CPoly, I, ONE, num

KEYWORDS = {"coeff", "deriv", "gen", "bracket", "relationpack", "field", "patch", "check",
            "even", "odd", "function", "weight", "on", "S", "T", "lam", "chi", "vac", "i", "Lam"}
PATCHES = {"free": 1, "pairs": 1, "flat": 1, "flatfree": 1, "constant": 1, "eta": 1}
CHECKS = {"n22": 0, "n2": 3, "skew": 2, "jacobi": 3, "bracket": 2}
ALIASES = {"χ": "chi", "λ": "lam", "Λ": "Lam"}
SUPERSCRIPTS = {"⁰": "0", "¹": "1", "²": "2", "³": "3", "⁴": "4", "⁵": "5", "⁶": "6",
                "⁷": "7", "⁸": "8", "⁹": "9"}


class ScriptError(Exception):
    def __init__(self, msg, line=0, col=0, expected=(), text=None):
        self.msg, self.line, self.col = msg, line, col
        self.expected = tuple(sorted(set(expected)))
        self.text = text
        super().__init__(self.render())

    def render(self):
        out = "%d:%d: %s" % (self.line, self.col, self.msg)
        if self.expected:
            out += " (expected %s)" % ", ".join(self.expected)
        if self.text is not None and self.line:
            lines = self.text.split("\n")
            if 0 < self.line <= len(lines):
                src = lines[self.line - 1]
                lo = max(0, self.col - 1 - 40)
                snippet = "".join(ch if ch.isprintable() else "?" for ch in src[lo:lo + 80])
                out += "\n  " + snippet + "\n  " + " " * (self.col - 1 - lo) + "^"
        return out


# ---------------------------------------------------------------- lexer

@dataclass
class Tok:
    kind: str   # NAME NUM PUNCT EOF
    value: str
    line: int
    col: int


_IDENT = re.compile(r"[A-Za-z](?:[A-Za-z0-9']|_(?!Λ))*")
_SUFFIX = re.compile(r"\[[A-Za-z0-9+\-,]*\]")
_NUM = re.compile(r"[0-9]+(?:/[0-9]+)?")
_PUNCT = set(";,=[](){}+-*^")


def lex(text):
    toks = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if c.isspace():
            i, col = i + 1, col + 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("_Λ", i):
            toks.append(Tok("NAME", "Lam", line, col))
            i, col = i + 2, col + 2
            continue
        if c in ALIASES:
            toks.append(Tok("NAME", ALIASES[c], line, col))
            i, col = i + 1, col + 1
            continue
        if c in SUPERSCRIPTS:
            j = i
            digits = ""
            while j < n and text[j] in SUPERSCRIPTS:
                digits += SUPERSCRIPTS[text[j]]
                j += 1
            toks.append(Tok("PUNCT", "^", line, col))
            toks.append(Tok("NUM", digits, line, col))
            col += j - i
            i = j
            continue
        if c == "−":
            toks.append(Tok("PUNCT", "-", line, col))
            i, col = i + 1, col + 1
            continue
        m = _IDENT.match(text, i)
        if m:
            j = m.end()
            s = _SUFFIX.match(text, j)
            if s:
                j = s.end()
            toks.append(Tok("NAME", text[i:j], line, col))
            col += j - i
            i = j
            continue
        m = _NUM.match(text, i)
        if m:
            toks.append(Tok("NUM", m.group(), line, col))
            col += m.end() - i
            i = m.end()
            continue
        if c in _PUNCT:
            toks.append(Tok("PUNCT", c, line, col))
            i, col = i + 1, col + 1
            continue
        raise ScriptError("unexpected character %r" % c, line, col, text=text)
    toks.append(Tok("EOF", "", line, col))
    return toks


# ---------------------------------------------------------------- AST

# Expressions are tuples:
#   ("num", Fraction)  ("i",)  ("name", str)  ("vac",)  ("lam", k)  ("chi",)
#   ("S", e)  ("T", e)  ("neg", e)  ("sum", (e, ...))  ("mul", (e, ...))


@dataclass
class Stmt:
    kind: str
    args: tuple
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass
class Script:
    stmts: list
    text: str = field(default="", compare=False)

    def __iter__(self):
        return iter(self.stmts)


# ---------------------------------------------------------------- parser

class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = lex(text)
        self.pos = 0
        self.names = {}    # name -> kind: coeff, gen, function, field
        self.patched = False

    # --- token helpers
    def peek(self, k=0):
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def next(self):
        t = self.peek()
        self.pos += 1
        return t

    def error(self, msg, tok=None, expected=()):
        tok = tok or self.peek()
        raise ScriptError(msg, tok.line, tok.col, expected, self.text)

    def at(self, value, kind=None):
        t = self.peek()
        return t.value == value and (kind is None or t.kind == kind) and t.kind != "EOF"

    def expect(self, value):
        t = self.peek()
        if t.value != value or t.kind == "EOF":
            self.error("unexpected %s" % _desc(t), t, [repr(value)])
        return self.next()

    def name(self, what="name"):
        t = self.peek()
        if t.kind != "NAME" or t.value in KEYWORDS:
            self.error("unexpected %s" % _desc(t), t, [what])
        return self.next()

    def declare(self, tok, kind):
        if tok.value in self.names:
            self.error("redefinition of %r" % tok.value, tok)
        self.names[tok.value] = kind

    def use(self, tok, kinds):
        k = self.names.get(tok.value)
        if k is None:
            self.error("unknown identifier %r" % tok.value, tok)
        if k not in kinds:
            self.error("%r is a %s, expected %s" % (tok.value, k, " or ".join(sorted(kinds))), tok)

    # --- script
    def script(self):
        out = []
        while self.peek().kind != "EOF":
            out.append(self.statement())
        return Script(out, self.text)

    def statement(self):
        t = self.peek()
        if t.kind != "NAME" or t.value not in ("coeff", "deriv", "gen", "bracket", "relationpack",
                                               "field", "patch", "check"):
            self.error("unexpected %s" % _desc(t), t,
                       ["coeff", "deriv", "gen", "bracket", "relationpack", "field", "patch", "check"])
        self.next()
        st = getattr(self, "st_" + t.value)()
        self.expect(";")
        st.line, st.col = t.line, t.col
        return st

    def st_coeff(self):
        names = [self.name("symbol")]
        while self.at(","):
            self.next()
            names.append(self.name("symbol"))
        for n in names:
            self.declare(n, "coeff")
        return Stmt("coeff", tuple(n.value for n in names))

    def st_gen(self):
        n = self.name("generator name")
        t = self.peek()
        if t.value not in ("even", "odd", "function"):
            self.error("unexpected %s" % _desc(t), t, ["even", "odd", "function"])
        self.next()
        w = None
        if t.value != "function" and self.at("weight"):
            self.next()
            w = self.number()
        self.declare(n, "function" if t.value == "function" else "gen")
        return Stmt("gen", (n.value, t.value, w))

    def number(self):
        t = self.peek()
        if t.kind != "NUM":
            self.error("unexpected %s" % _desc(t), t, ["number"])
        self.next()
        return Fraction(t.value)

    def st_deriv(self):
        g = self.name("generator")
        self.use(g, {"gen"})
        self.expect("on")
        f = self.name("function")
        self.use(f, {"function"})
        self.expect("=")
        return Stmt("deriv", (g.value, f.value, self.expr()))

    def bracket_pair(self):
        self.expect("[")
        a = self.name("generator")
        self.use(a, {"gen", "function"})
        if self.at("Lam"):
            self.next()
        else:
            self.expect(",")
        b = self.name("generator")
        self.use(b, {"gen", "function"})
        self.expect("]")
        return a.value, b.value

    def st_bracket(self):
        a, b = self.bracket_pair()
        self.expect("=")
        return Stmt("bracket", (a, b, self.expr(lam=True)))

    def st_relationpack(self):
        name = self.name("pack name")
        self.expect("{")
        rules = []
        while True:
            s = self.name("symbol")
            self.use(s, {"coeff"})
            self.expect("=")
            rules.append((s.value, self.expr(scalar=True)))
            if self.at(","):
                self.next()
                continue
            break
        self.expect("}")
        return Stmt("relationpack", (name.value, tuple(rules)))

    def st_field(self):
        n = self.name("field name")
        self.expect("=")
        e = self.expr()
        self.declare(n, "field")
        return Stmt("field", (n.value, e))

    def st_patch(self):
        if self.names:
            self.error("patch must precede all other declarations")
        kind = self.name("patch kind")
        if kind.value not in PATCHES:
            self.error("unknown patch %r" % kind.value, kind, sorted(PATCHES))
        self.expect("(")
        n = self.number()
        self.expect(")")
        if n.denominator != 1 or n < 1:
            self.error("patch dimension must be a positive integer", kind)
        try:
            P, named = patch_presentation(kind.value, int(n))
        except ValueError as exc:
            self.error(str(exc), kind)
        for g in P.gen_names:
            self.names[g] = "function" if P.kind(g) == "function" else "gen"
        for nm in named:
            self.names[nm] = "field"
        return Stmt("patch", (kind.value, int(n)))

    def st_check(self):
        kind = self.peek()
        if kind.value not in CHECKS:
            self.error("unexpected %s" % _desc(kind), kind, sorted(CHECKS))
        self.next()
        args = []
        if kind.value == "n22":
            return Stmt("check", ("n22",))
        if kind.value == "n2":
            args = [self.expr(), self.comma_expr(), None]
            self.expect(",")
            args[2] = self.number()
            return Stmt("check", ("n2",) + tuple(args))
        args = [self.expr()]
        for _ in range(CHECKS[kind.value] - 1):
            args.append(self.comma_expr())
        if kind.value == "bracket":
            self.expect("=")
            args.append(self.expr(lam=True))
        return Stmt("check", (kind.value,) + tuple(args))

    def comma_expr(self):
        self.expect(",")
        return self.expr()

    # --- expressions
    def expr(self, lam=False, scalar=False):
        self.mode = (lam, scalar)
        terms = [self.term()]
        while self.at("+") or self.at("-"):
            if self.next().value == "-":
                terms.append(("neg", self.term()))
            else:
                terms.append(self.term())
        return terms[0] if len(terms) == 1 else ("sum", tuple(terms))

    def term(self):
        if self.at("-"):
            self.next()
            return ("neg", self.term())
        fs = [self.factor()]
        while self.at("*"):
            self.next()
            fs.append(self.factor())
        return fs[0] if len(fs) == 1 else ("mul", tuple(fs))

    def factor(self):
        lam, scalar = self.mode
        t = self.peek()
        if t.kind == "NUM":
            return ("num", self.number())
        if t.kind == "PUNCT" and t.value == "(":
            self.next()
            mode = self.mode
            e = self.expr(*mode)
            self.mode = mode
            self.expect(")")
            return e
        if t.kind != "NAME":
            self.error("unexpected %s" % _desc(t), t, ["expression"])
        v = t.value
        if v == "i":
            self.next()
            return ("i",)
        if v in ("S", "T") and not scalar:
            self.next()
            return (v, self.factor())
        if v == "vac" and not scalar:
            self.next()
            return ("vac",)
        if v in ("lam", "chi"):
            if not lam:
                self.error("%s is only allowed in bracket values" % v, t)
            self.next()
            if v == "chi":
                return ("chi",)
            k = 1
            if self.at("^"):
                self.next()
                k = self.number()
                if k.denominator != 1:
                    self.error("integer exponent expected", t)
                k = int(k)
            return ("lam", k)
        if v in KEYWORDS:
            self.error("unexpected %s" % _desc(t), t, ["expression"])
        self.next()
        self.use(t, {"coeff"} if scalar else {"coeff", "gen", "function", "field"})
        return ("name", v)


def _desc(t):
    if t.kind == "EOF":
        return "end of input"
    return "%r" % t.value


def parse(text):
    """Script text -> Script; raises ScriptError with line/column."""
    if not isinstance(text, str):
        raise ScriptError("script must be text")
    try:
        return _Parser(text).script()
    except ScriptError:
        raise
    except RecursionError:
        raise ScriptError("expression nested too deeply") from None


def try_parse(text):
    try:
        return parse(text), None
    except ScriptError as exc:
        return None, exc


# ---------------------------------------------------------------- render

def render_expr(e):
    k = e[0]
    if k == "num":
        return str(e[1])
    if k == "i":
        return "i"
    if k == "name":
        return e[1]
    if k == "vac":
        return "vac"
    if k == "chi":
        return "chi"
    if k == "lam":
        return "lam" if e[1] == 1 else "lam^%d" % e[1]
    if k in ("S", "T"):
        return "%s %s" % (k, _atomic(e[1]))
    if k == "neg":
        inner = e[1]
        return "-" + (_paren(inner) if inner[0] == "sum" else render_expr(inner))
    if k == "sum":
        return " + ".join(render_expr(t) for t in e[1])
    if k == "mul":
        return " * ".join(_paren(f) if f[0] in ("sum", "mul", "neg") else render_expr(f) for f in e[1])
    raise ValueError("bad expression node %r" % (k,))


def _paren(e):
    return "(" + render_expr(e) + ")"


def _atomic(e):
    return render_expr(e) if e[0] in ("num", "i", "name", "vac", "S", "T") else _paren(e)


def _num(x):
    return str(x)


def render(script):
    out = []
    for st in script:
        a = st.args
        if st.kind == "coeff":
            s = "coeff " + ", ".join(a)
        elif st.kind == "gen":
            s = "gen %s %s" % (a[0], a[1]) + ("" if a[2] is None else " weight %s" % _num(a[2]))
        elif st.kind == "deriv":
            s = "deriv %s on %s = %s" % (a[0], a[1], render_expr(a[2]))
        elif st.kind == "bracket":
            s = "bracket [%s, %s] = %s" % (a[0], a[1], render_expr(a[2]))
        elif st.kind == "relationpack":
            s = "relationpack %s { %s }" % (a[0], ", ".join("%s = %s" % (k, render_expr(v)) for k, v in a[1]))
        elif st.kind == "field":
            s = "field %s = %s" % (a[0], render_expr(a[1]))
        elif st.kind == "patch":
            s = "patch %s(%d)" % a
        elif st.kind == "check":
            kind = a[0]
            if kind == "n22":
                s = "check n22"
            elif kind == "n2":
                s = "check n2 %s, %s, %s" % (render_expr(a[1]), render_expr(a[2]), _num(a[3]))
            elif kind == "bracket":
                s = "check bracket %s, %s = %s" % (render_expr(a[1]), render_expr(a[2]), render_expr(a[3]))
            else:
                s = "check %s %s" % (kind, ", ".join(render_expr(x) for x in a[1:]))
        else:
            raise ValueError("bad statement %r" % st.kind)
        out.append(s + ";")
    return "\n".join(out) + ("\n" if out else "")


# ---------------------------------------------------------------- build

def patch_presentation(kind, n):
    """Built-in presentations; named fields use keys J[+], J[-], H[+], H[-], J1, J2, H."""
    if kind == "free":
        return PR.free_sigma_model(n), {"H": PR.free_H(n)}
    if kind == "pairs":
        P = PR.free_pairs(n)
        return P, {"H": PR.pairs_H(P)}
    if kind == "flat":
        P = PR.flat_patch(n)
        return P, _bracket_keys(PR.named_fields(P))
    if kind == "flatfree":
        P, named = PR.flat_free_fields(n)
        return P, _bracket_keys(named)
    if kind == "constant":
        P = PR.constant_structure_patch(n)
        return P, {}
    if kind == "eta":
        P = PR.eta_patch(n)
        return P, {}
    raise ValueError("unknown patch %r" % kind)


def _bracket_keys(named):
    return {(k[0] + "[" + k[1] + "]" if k[-1] in "+-" else k): v for k, v in named.items()}


def named_key(name):
    """DSL field name -> presentations key (J[+] -> J+)."""
    m = re.fullmatch(r"([JH])\[([+-])\]", name)
    return m.group(1) + m.group(2) if m else name


@dataclass
class Built:
    P: Presentation
    fields: dict
    coeffs: set
    checks: list


def _scalar_value(e, coeffs):
    k = e[0]
    if k == "num":
        return num(e[1])
    if k == "i":
        return I
    if k == "name":
        if e[1] not in coeffs:
            raise ScriptError("%r is not a coefficient symbol" % e[1])
        return CPoly.symbol(e[1])
    if k == "neg":
        return -_scalar_value(e[1], coeffs)
    if k == "sum":
        out = num(0)
        for t in e[1]:
            out = out + _scalar_value(t, coeffs)
        return out
    if k == "mul":
        out = ONE
        for t in e[1]:
            v = _scalar_value(t, coeffs)
            out = v * out if isinstance(v, CPoly) else out * v
        return out
    raise ScriptError("not a scalar expression: %s" % render_expr(e))


def _is_scalar(e, coeffs):
    k = e[0]
    if k in ("num", "i"):
        return True
    if k == "name":
        return e[1] in coeffs
    if k in ("neg", "sum", "mul"):
        return all(_is_scalar(t, coeffs) for t in (e[1] if k != "neg" else (e[1],)))
    return False


def to_field(e, b):
    """Expression AST -> FieldExpr (no λ/χ)."""
    return _lam_terms(e, b, allow_lam=False)[(0, 0)] if _lam_terms(e, b, allow_lam=False) else F.CoeffMul(num(0), F.Vac())


def _lam_terms(e, b, allow_lam=True):
    """Expression -> {(j, J): FieldExpr} (a Λ-polynomial)."""
    k = e[0]
    coeffs = b.coeffs
    if _is_scalar(e, coeffs):
        return {(0, 0): F.CoeffMul(_scalar_value(e, coeffs), F.Vac())}
    if k == "name":
        if e[1] in b.fields:
            return {(0, 0): b.fields[e[1]]}
        return {(0, 0): F.Gen(e[1])}
    if k == "vac":
        return {(0, 0): F.Vac()}
    if k in ("lam", "chi"):
        if not allow_lam:
            raise ScriptError("%s outside a bracket value" % k)
        key = (e[1], 0) if k == "lam" else (0, 1)
        return {key: F.Vac()}
    if k in ("S", "T"):
        inner = _lam_terms(e[1], b, False)[(0, 0)]
        return {(0, 0): (F.S if k == "S" else F.T)(inner)}
    if k == "neg":
        return {key: F.CoeffMul(-ONE, v) for key, v in _lam_terms(e[1], b, allow_lam).items()}
    if k == "sum":
        out = {}
        for t in e[1]:
            for key, v in _lam_terms(t, b, allow_lam).items():
                out[key] = F.Sum((out[key], v)) if key in out else v
        return out
    if k == "mul":
        coeff = ONE
        j = J = 0
        fs = []
        for f in e[1]:
            if _is_scalar(f, coeffs):
                v = _scalar_value(f, coeffs)
                coeff = v * coeff if isinstance(v, CPoly) else coeff * v
            elif f[0] == "lam" and allow_lam:
                if J or fs:
                    raise ScriptError("write λ and χ before field factors, λ before χ")
                j += f[1]
            elif f[0] == "chi" and allow_lam:
                if J or fs:
                    raise ScriptError("χ may appear once, before field factors")
                J = 1
            else:
                sub = _lam_terms(f, b, False)
                fs.append(sub.get((0, 0), F.CoeffMul(num(0), F.Vac())))
        body = F.Vac() if not fs else fs[-1]
        for x in reversed(fs[:-1]):
            body = F.NO(x, body)
        return {(j, J): F.CoeffMul(coeff, body) if coeff != ONE else body}
    raise ScriptError("bad expression %r" % (k,))


def build(script):
    """Script -> Built (presentation, fields, checks)."""
    P = Presentation("script")
    fields_ = {}
    coeffs = set()
    rel = {}
    b = Built(P, fields_, coeffs, [])
    for st in script:
        a = st.args
        try:
            if st.kind == "patch":
                P, named = patch_presentation(*a)
                b.P = P
                fields_.update(named)
            elif st.kind == "coeff":
                coeffs.update(a)
            elif st.kind == "gen":
                name, kind, w = a
                if kind == "function":
                    b.P.add_function(name)
                else:
                    b.P.add_gen(name, kind, weight=w)
            elif st.kind == "deriv":
                b.P.anchor(a[0], a[1], to_field(a[2], b))
            elif st.kind == "bracket":
                b.P.set_bracket(a[0], a[1], _lam_terms(a[2], b))
            elif st.kind == "relationpack":
                for sym, e in a[1]:
                    rel[sym] = _scalar_value(e, coeffs)
                b.P.set_relations(dict(getattr(b.P, "relations", {}), **rel))
            elif st.kind == "field":
                fields_[a[0]] = to_field(a[1], b)
            elif st.kind == "check":
                b.checks.append(st)
        except ScriptError as exc:
            raise ScriptError(exc.msg, st.line, st.col, text=script.text) from None
        except (ValueError, KeyError) as exc:
            raise ScriptError(str(exc), st.line, st.col, text=script.text) from None
    if not hasattr(b.P, "dim"):
        b.P.dim = _infer_dim(b.P)
    return b


def _infer_dim(P):
    frames = [g for g in P.gen_names if g.startswith("e[+,")]
    return len(frames) if frames else max(1, len([g for g in P.gen_names if P.parity(g) == 0 and P.kind(g) == "field"]) // 2)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def named_fields_of(b):
    return {named_key(k): v for k, v in b.fields.items()}
