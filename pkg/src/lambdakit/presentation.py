"""Presentations: generators with parities and a table of generator brackets."""
from fractions import Fraction

from . import fields as F
from .engine import Engine, MissingBracket
from .scalars import num


class Presentation:
    """Generators, declared Λ-brackets between them, and anchor actions.

    Brackets are stored as ``{(j, J): FieldExpr}`` meaning ``Σ λ^j χ^J X``.
    Only one orientation needs to be declared; the other is obtained by
    skew-symmetry.  Undeclared pairs of declared generators bracket to zero.

    Function generators (``kind="function"``) model coefficient functions:
    they are even, weight 0, bracket to zero among themselves, and
    ``anchor(gen, f, value)`` declares ``[gen_Λ f] = value``.
    """

    def __init__(self, name=""):
        self.name = name
        self._fields = []
        self._functions = []
        self.info = {}
        self.brackets = {}
        self.relations = {}
        self.named = {}
        self._engine = None

    # ------------------------------------------------------------ declaration

    def _touch(self):
        self._engine = None

    def add_gen(self, name, parity, weight=None, kind="field"):
        if name in self.info:
            raise ValueError("generator %r already declared" % name)
        parity = {"even": 0, "odd": 1}.get(parity, parity)
        if parity not in (0, 1):
            raise ValueError("parity must be even or odd")
        if kind == "function":
            if parity:
                raise ValueError("function generators are even")
            weight = Fraction(0)
            self._functions.append(name)
        else:
            self._fields.append(name)
        w = Fraction(weight if weight is not None else Fraction(parity, 2))
        self.info[name] = {"parity": parity, "weight": w, "kind": kind}
        self._touch()
        return F.Gen(name)

    def add_function(self, name):
        return self.add_gen(name, 0, kind="function")

    def set_bracket(self, a, b, value):
        """Declare [a_Λ b]; value is a scalar, FieldExpr or {(j, J): expr}."""
        for g in (a, b):
            if g not in self.info:
                raise MissingBracket("undeclared generator %r" % g)
        if not isinstance(value, dict):
            value = {(0, 0): value}
        clean = {}
        for (j, J), e in value.items():
            if J not in (0, 1) or j < 0:
                raise ValueError("bad Λ exponent %r" % ((j, J),))
            clean[(j, J)] = F.as_expr(e)
        if (b, a) in self.brackets and a != b:
            raise ValueError("bracket [%s, %s] already determined by skew-symmetry" % (a, b))
        self.brackets[(a, b)] = clean
        self._touch()

    def anchor(self, gen, func, value):
        if self.info.get(func, {}).get("kind") != "function":
            raise ValueError("%r is not a function generator" % func)
        self.set_bracket(gen, func, value)

    def set_relations(self, table):
        self.relations = {k: num(v) if not hasattr(v, "terms") else v for k, v in table.items()}
        self._touch()

    # ------------------------------------------------------------ queries

    @property
    def gen_names(self):
        return self._functions + self._fields

    def parity(self, name):
        try:
            return self.info[name]["parity"]
        except KeyError:
            raise MissingBracket("undeclared generator %r" % name) from None

    def weight(self, name):
        return self.info[name]["weight"]

    def gen_weight(self, gid):
        return self.info[self.gen_names[gid]]["weight"]

    def kind(self, name):
        return self.info[name]["kind"]

    def declared_bracket(self, a, b):
        return self.brackets.get((a, b))

    def gen(self, name):
        if name not in self.info:
            raise MissingBracket("undeclared generator %r" % name)
        return F.Gen(name)

    def engine(self):
        if self._engine is None:
            self._engine = Engine(self)
        return self._engine

    def __repr__(self):
        return "Presentation(%s, %d generators)" % (self.name, len(self.info))
