"""Zero modes of the two N=2 structures, BRST checks and cohomology.

Zero modes are linear combinations of Fourier modes of the named fields
(``RECIPES``).  They are realized two ways: as sparse matrices on the flat
Fock module, and through the engine (Λ-bracket mode extraction acting on a
state).  All linear algebra is exact over Q(i).
"""
from fractions import Fraction

from sympy import QQ_I
from sympy.polys.matrices import DomainMatrix

from . import fields as F
from .fock import FockOperator, Oracle, build_fock, field_to_operator
from .presentations import flat_free_fields
from .scalars import HALF, I, ONE, ZERO, factorial, num

# label -> [(coeff, field, (j, J))]; field "H" / "J" means H^± / J^± of the sector
RECIPES = {
    "L0": [(HALF, "H", (1, 0)), (I / 2, "J", (0, 1))],
    "J0": [(-I, "J", (0, 1))],
    "Q0": [(HALF, "H", (0, 1)), (I / 2, "J", (0, 0))],
    "G0": [(HALF, "H", (1, 1)), (-I / 2, "J", (1, 0))],
    "G0_printed": [(HALF, "H", (0, 1)), (-I / 2, "J", (0, 0))],
}
LABELS = ("L0", "J0", "Q0", "G0")


def op_name(label, sector):
    return label + sector


# ---------------------------------------------------------------- realizations

class TwistModule:
    """Flat model in free fields with all zero modes as Fock matrices.

    The basis is built to ``cutoff + 1/2`` so that products of operators
    that raise the untwisted weight by 1/2 are exact on every state of
    weight <= cutoff.
    """

    def __init__(self, n=1, cutoff=2, named=None, P=None):
        if named is None:
            P, named = flat_free_fields(n)
        self.P = P
        self.named = named
        self.cutoff = Fraction(cutoff)
        self.basis = build_fock(P, self.cutoff + HALF_F)
        self.oracle = Oracle(P)
        self.ops = {}
        for s in "+-":
            for label in RECIPES:
                self.ops[op_name(label, s)] = self.realize(RECIPES[label], s)

    def realize(self, recipe, sector, fields=None):
        fields = fields or self.named
        out = None
        for c, f, mode in recipe:
            o = field_to_operator(fields[f + sector], mode, self.basis, self.oracle).scale(c)
            out = o if out is None else out + o
            out.parity, out.shift = o.parity, o.shift
        return out

    def low(self, op):
        """Restriction to source states of weight <= cutoff."""
        b = self.basis
        return FockOperator(b, {(r, c): v for (r, c), v in op.entries.items()
                                if b.weight(c) <= self.cutoff},
                            op.label, op.parity, op.shift)

    def __getitem__(self, k):
        return self.ops[k]


HALF_F = Fraction(1, 2)


def zero_modes(named, basis=None, n=1, cutoff=2):
    """Dict of the eight zero modes (plus the printed G0 form) on the Fock module."""
    for s in "+-":
        for f in ("H", "J"):
            if f + s not in named:
                raise KeyError("missing field %s%s" % (f, s))
    return TwistModule(n=n, cutoff=cutoff, named=named).ops


def engine_zero_mode(label, sector, named, P, state):
    """Apply a zero mode to a state through the engine: sum of c * F_(j|J) X."""
    eng = P.engine()
    x = eng.canon(state)
    out = {}
    for c, f, (j, J) in RECIPES[label]:
        lp = eng.bracket_states(eng.canon(named[f + sector]), x)
        for m, v in lp.get((j, J), {}).items():
            out[m] = out.get(m, ZERO) + v * c * num(factorial(j))
    return F.State(P, out)


# ---------------------------------------------------------------- checks

def _square(op):
    return (op @ op)


def brst_check(tm, ops=None):
    """Residual matrices (as nonzero counts) of the twist relations."""
    ops = ops or tm.ops
    res = {}
    for s in "+-":
        res["Q0%s^2" % s] = tm.low(_square(ops["Q0" + s]))
        res["G0%s^2" % s] = tm.low(_square(ops["G0" + s]))
        res["[G0%s,Q0%s]-L0%s" % (s, s, s)] = tm.low(
            ops["G0" + s].supercommutator(ops["Q0" + s]) - ops["L0" + s])
    for a in LABELS:
        for b in LABELS:
            res["[%s+,%s-]" % (a, b)] = tm.low(ops[a + "+"].supercommutator(ops[b + "-"]))
    return {k: v.nnz() for k, v in res.items()}


def printed_G_diagnostic(tm):
    """Nonzero count of [G0,Q0] - L0 and [L0,G0] with G0 as printed."""
    out = {}
    for s in "+-":
        g = tm.ops["G0_printed" + s]
        out["[G0%s,Q0%s]-L0%s" % (s, s, s)] = tm.low(
            g.supercommutator(tm.ops["Q0" + s]) - tm.ops["L0" + s]).nnz()
        out["[L0%s,G0%s]" % (s, s)] = tm.low(tm.ops["L0" + s].supercommutator(g)).nnz()
    return out


def negative_control(tm):
    """Q0+ with the J term dropped, i.e. half the (0|1) mode of H+; its
    square must not vanish, showing the residual check detects failure."""
    q = tm.realize([(HALF, "H", (0, 1))], "+")
    return tm.low(_square(q)).nnz()


# ---------------------------------------------------------------- linear algebra

def _dm(rows, ncols):
    return DomainMatrix([[QQ_I.convert(x) for x in r] for r in rows], (len(rows), ncols), QQ_I)


def _block_matrix(op, idx):
    pos = {c: k for k, c in enumerate(idx)}
    rows = [[ZERO] * len(idx) for _ in idx]
    for (r, c), v in op.entries.items():
        if c in pos:
            if r not in pos:
                raise ValueError("operator does not preserve the block")
            rows[pos[r]][pos[c]] = v
    return rows


def _nullspace(rows, n):
    if not rows:
        return [[ONE if i == k else ZERO for i in range(n)] for k in range(n)]
    ns = _dm(rows, n).nullspace().to_Matrix()
    return [[QQ_I.convert(ns[i, j]) for j in range(n)] for i in range(ns.rows)]


def _int_eigenvalues(rows):
    """Integer eigenvalues of a square matrix; any other root is an error."""
    from sympy import Poly, roots, symbols
    n = len(rows)
    if not n:
        return []
    cp = _dm(rows, n).charpoly()
    x = symbols("x")
    poly = Poly([QQ_I.to_sympy(c) for c in cp], x)
    out = []
    for r in roots(poly, x):
        if not r.is_integer:
            raise ValueError("non-integer charge %s" % r)
        out.append(int(r))
    return sorted(out)


def _matvec(M, v):
    return [sum((a * b for a, b in zip(row, v)), ZERO) for row in M]


def charge_cells(tm, max_weight=None):
    """Joint eigenspaces of (J0-, J0+) inside each untwisted weight block.

    Returns {(w, q-, q+): [vectors over basis indices]} with w the twisted
    weight (L0+ + L0- eigenvalue) = untwisted weight - (q+ + q-)/2.
    """
    b = tm.basis
    top = tm.cutoff if max_weight is None else Fraction(max_weight)
    blocks = {}
    for i in range(len(b)):
        if b.weight(i) <= top:
            blocks.setdefault(b.weight(i), []).append(i)
    Jm, Jp = tm.ops["J0-"], tm.ops["J0+"]
    cells = {}
    for W, idx in sorted(blocks.items()):
        n = len(idx)
        mp, mm = _block_matrix(Jp, idx), _block_matrix(Jm, idx)
        found = 0
        for qp in _int_eigenvalues(mp):
            A = [[mp[r][c] - (num(qp) if r == c else ZERO) for c in range(n)] for r in range(n)]
            for qm in _int_eigenvalues(mm):
                B = [[mm[r][c] - (num(qm) if r == c else ZERO) for c in range(n)] for r in range(n)]
                vs = _nullspace(A + B, n)
                if vs:
                    w = W - Fraction(qp + qm, 2)
                    cells[(w, qm, qp)] = [{idx[k]: x for k, x in enumerate(v) if x} for v in vs]
                    found += len(vs)
        if found != n:
            raise ValueError("J0 charges not diagonalizable on weight %s block" % W)
    return cells


def _apply(op, vec):
    out = {}
    for (r, c), v in op.entries.items():
        x = vec.get(c)
        if x:
            out[r] = out.get(r, ZERO) + v * x
    return {k: v for k, v in out.items() if v}


def _rank(vecs):
    vecs = [v for v in vecs if v]
    if not vecs:
        return 0
    keys = sorted(set().union(*vecs))
    pos = {k: i for i, k in enumerate(keys)}
    rows = [[ZERO] * len(keys) for _ in vecs]
    for r, v in enumerate(vecs):
        for k, x in v.items():
            rows[r][pos[k]] = x
    return _dm(rows, len(keys)).rank()


DIFFERENTIALS = {
    # name: (operator labels, degree as function of (q-, q+))
    "Q+": (("Q0+",), lambda qm, qp: qp),
    "Q-": (("Q0-",), lambda qm, qp: qm),
    "QB": (("Q0+", "Q0-"), lambda qm, qp: qp + qm),
    "QA": (("Q0+", "G0-"), lambda qm, qp: qp - qm),
}


def differential(tm, name):
    labels, deg = DIFFERENTIALS[name]
    op = tm.ops[labels[0]]
    for l in labels[1:]:
        op = op + tm.ops[l]
    return op, deg


def cohomology_table(tm, name, weight):
    """Cohomology of a differential at twisted weight ``weight``.

    Rows are ``(degree, cells, dim, rank_out, rank_in, dim_H)``; cells
    are the (q-, q+) charge pairs forming that degree.
    """
    weight = Fraction(weight)
    D, deg = differential(tm, name)
    cells = charge_cells(tm)
    groups = {}
    for (w, qm, qp), vecs in cells.items():
        if w == weight:
            g = groups.setdefault(deg(qm, qp), {"cells": [], "vecs": []})
            g["cells"].append((qm, qp))
            g["vecs"] += vecs
    rank_out = {d: _rank([_apply(D, v) for v in g["vecs"]]) for d, g in groups.items()}
    rows = []
    for d in sorted(groups):
        g = groups[d]
        rin = rank_out.get(d - 1, 0)
        rows.append({"degree": d, "cells": sorted(g["cells"]), "dim": len(g["vecs"]),
                     "rank_out": rank_out[d], "rank_in": rin,
                     "dim_H": len(g["vecs"]) - rank_out[d] - rin})
    return rows


def brst_cohomology(name, weight, n=1, cutoff=2, check_stability=True):
    """Cohomology table plus a stability flag from recomputing at cutoff + 1."""
    if Fraction(weight) > Fraction(cutoff) - 1:
        raise ValueError("weight must be <= cutoff - 1")
    tm = TwistModule(n=n, cutoff=cutoff)
    rows = cohomology_table(tm, name, weight)
    stable = None
    if check_stability:
        hi = cohomology_table(TwistModule(n=n, cutoff=Fraction(cutoff) + 1), name, weight)
        key = lambda rs: [(r["degree"], r["dim_H"]) for r in rs if r["dim_H"]]
        stable = key(rows) == key(hi)
    return {"differential": name, "weight": str(Fraction(weight)), "rows": rows, "stable": stable}


def hand_weight_zero_cell(n=1):
    """Independent count of ker d_{L1+} on the twisted weight-0 cell.

    On the flat model the weight-0 cell is the exterior algebra on the
    lowest components of the conjugate frames ed[+,a], ed[-,a] with constant
    coefficients.  The algebroid differential on constant-coefficient forms
    is built from the flat Dorfman brackets and anchors, which all vanish,
    so every cochain is closed and nothing is exact.  Returned per (q-, q+).
    """
    from .geometry import algebroid_differential_flat
    d = algebroid_differential_flat(n)
    out = {}
    for qm in range(n + 1):
        for qp in range(n + 1):
            dim = _binom(n, qm) * _binom(n, qp)
            ker = dim - d.get((qm, qp), 0)
            out[(qm, qp)] = ker - d.get((qm, qp - 1), 0)
    return out


def _binom(n, k):
    from math import comb
    return comb(n, k)
