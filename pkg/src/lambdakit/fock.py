"""Free-field Fock module: an engine-independent check of Λ-brackets.

Works for any presentation whose generator brackets are scalar Λ-polynomials
(free superfields).  Every superfield g contributes two ordinary components,
``g|`` and ``(Sg)|``; their λ-brackets are read off from the declared
Λ-brackets through the Fourier-mode dictionary

    [a_Λ b] = [Sa_λ b] + χ [a_λ b],

and the missing orientations and S-images are derived from the ordinary
vertex-algebra axioms (skew-symmetry, S an odd derivation, T-covariance).

States are sparse dicts ``{monomial: scalar}``; a monomial is a sorted
tuple of creation modes ``(component, n)`` with ``n <= -1``.  Modes of
composite fields are evaluated with the normally-ordered-product mode
formula, never with the Λ-bracket rules.
"""
import os
from fractions import Fraction

from . import fields as F
from .scalars import ONE, ZERO, binom, factorial, num, is_number

BUDGET_ENV = "LAMBDAKIT_FOCK_BUDGET"
DEFAULT_BUDGET = 200000


class ResourceError(RuntimeError):
    pass


class WeightOverflow(ValueError):
    pass


class Underdetermined(ValueError):
    pass


def _vadd(acc, vec, c=ONE):
    for m, v in vec.items():
        w = acc.get(m, ZERO) + v * c
        if w:
            acc[m] = w
        else:
            acc.pop(m, None)
    return acc


class FreeFieldSystem:
    """Component fields and their scalar brackets for a presentation."""

    def __init__(self, P):
        self.P = P
        self.names = []
        self.parity = []
        self.weight = []
        for g in P.gen_names:
            if P.kind(g) != "field":
                raise ValueError("the Fock oracle only supports field generators")
            p, w = P.parity(g), P.weight(g)
            self.names += [g + "|", "S" + g + "|"]
            self.parity += [p, 1 - p]
            self.weight += [w, w + Fraction(1, 2)]
        n = len(P.gen_names)
        self.ncomp = 2 * n
        # const[(x, y)] = {j: x_(j) y}
        self.const = {}
        gid = {g: i for i, g in enumerate(P.gen_names)}
        for (a, b), val in P.brackets.items():
            ia, ib = gid[a], gid[b]
            pa = P.parity(a)
            tab = {}
            for (j, J), e in val.items():
                c = _scalar(e)
                if c:
                    tab[(j, J)] = c * num(factorial(j))
            x, sx, y, sy = 2 * ia, 2 * ia + 1, 2 * ib, 2 * ib + 1
            self._put(x, y, {j: c for (j, J), c in tab.items() if J == 1})
            self._put(sx, y, {j: c for (j, J), c in tab.items() if J == 0})
            # a_(j) Sb = -(-1)^a (Sa)_(j) b      (S kills the vacuum)
            self._put(x, sy, {j: -c if not pa else c for (j, J), c in tab.items() if J == 0})
            # (Sa)_(j) Sb = (-1)^a (Ta)_(j) b = (-1)^(a+1) j a_(j-1) b
            self._put(sx, sy, {j + 1: (c * (j + 1) if pa else -c * (j + 1))
                               for (j, J), c in tab.items() if J == 1})
        # skew-symmetry for the reversed pairs: y_(j) x = -(-1)^{xy} Σ (-1)^{j+k} T^k/k! ... on
        # scalars only the k = 0 term survives
        for (x, y), tab in list(self.const.items()):
            if (y, x) in self.const and x != y:
                continue
            s = -ONE if not (self.parity[x] and self.parity[y]) else ONE
            rev = {j: (c if j % 2 == 0 else -c) * s for j, c in tab.items()}
            if x == y:
                if rev != tab:
                    raise ValueError("self-bracket not skew-consistent for %s" % self.names[x])
                continue
            self._put(y, x, rev)
        self._mode_cache = {}

    def _put(self, x, y, tab):
        tab = {j: c for j, c in tab.items() if c}
        if not tab:
            return
        cur = self.const.setdefault((x, y), {})
        for j, c in tab.items():
            cur[j] = cur.get(j, ZERO) + c

    def commutator(self, x, m, y, n):
        """[x_(m), y_(n)] as a scalar (both components)."""
        tab = self.const.get((x, y))
        if not tab:
            return ZERO
        j = m + n + 1
        c = tab.get(j)
        if c is None or j < 0:
            return ZERO
        b = binom(m, j) if m >= 0 else binom(m, j)
        return c * num(b) if b else ZERO

    def mode_weight(self, x, n):
        return self.weight[x] - n - 1

    def mono_weight(self, mono):
        return sum((self.mode_weight(x, n) for x, n in mono), Fraction(0))

    # ------------------------------------------------------------ basic modes

    def apply_mode(self, x, n, mono):
        """x_(n) applied to a basis monomial; returns a sparse vector."""
        px = self.parity[x]
        if n <= -1:
            lab = (x, n)
            # insert into the sorted tuple
            pos = 0
            odd_before = 0
            for pos, y in enumerate(mono):
                if y >= lab:
                    break
                odd_before += self.parity[y[0]]
            else:
                pos = len(mono)
            if pos < len(mono) and mono[pos] == lab and px:
                return {}
            sign = -ONE if (px and odd_before % 2) else ONE
            return {mono[:pos] + (lab,) + mono[pos:]: sign}
        out = {}
        odd_before = 0
        for k, (y, m) in enumerate(mono):
            c = self.commutator(x, n, y, m)
            if c:
                sign = -ONE if (px and odd_before % 2) else ONE
                rest = mono[:k] + mono[k + 1:]
                out[rest] = out.get(rest, ZERO) + c * sign
            odd_before += self.parity[y]
        return {k: v for k, v in out.items() if v}


def _scalar(e):
    if is_number(e) or isinstance(e, int):
        return num(e)
    if isinstance(e, F.CoeffMul) and isinstance(e.child, F.Vac):
        return num(e.coeff)
    if isinstance(e, F.Vac):
        return ONE
    if isinstance(e, F.Sum):
        return sum((_scalar(c) for c in e.children), ZERO)
    raise ValueError("Fock oracle needs scalar generator brackets, got %s" % (e,))


# ---------------------------------------------------------------- field trees
#
# node := ("vac",) | ("atom", comp) | ("T", node) | ("no", node, node)
#       | ("lin", ((coeff, node), ...))

VAC_NODE = ("vac",)


def _lin(items):
    items = tuple((c, n) for c, n in items if c and n is not None)
    if not items:
        return None
    if len(items) == 1 and items[0][0] == ONE:
        return items[0][1]
    return ("lin", items)


class Oracle:
    def __init__(self, P, cutoff=None):
        self.P = P
        self.sys = FreeFieldSystem(P)
        self.gid = {g: i for i, g in enumerate(P.gen_names)}
        self.cutoff = Fraction(cutoff) if cutoff is not None else None
        self._memo = {}
        self._par = {}
        self._wt = {}

    # ------------------------------------------------------------ conversion

    def node(self, e):
        """SUSY field expression -> component tree of its lowest component."""
        if isinstance(e, F.State):
            e = e.to_expr()
        if isinstance(e, F.Gen):
            return ("atom", 2 * self.gid[e.name])
        if isinstance(e, F.Vac):
            return VAC_NODE
        if isinstance(e, F.T):
            c = self.node(e.child)
            return None if c is None else ("T", c)
        if isinstance(e, F.S):
            return self.S_node(self.node(e.child))
        if isinstance(e, F.NO):
            a, b = self.node(e.left), self.node(e.right)
            if a is None or b is None:
                return None
            return ("no", a, b)
        if isinstance(e, F.CoeffMul):
            return _lin([(num(e.coeff), self.node(e.child))])
        if isinstance(e, F.Sum):
            return _lin([(ONE, self.node(c)) for c in e.children])
        raise TypeError(e)

    def S_node(self, nd):
        if nd is None:
            return None
        kind = nd[0]
        if kind == "vac":
            return None
        if kind == "atom":
            x = nd[1]
            return ("atom", x + 1) if x % 2 == 0 else ("T", ("atom", x - 1))
        if kind == "T":
            s = self.S_node(nd[1])
            return None if s is None else ("T", s)
        if kind == "no":
            a, b = nd[1], nd[2]
            sign = -ONE if self.node_parity(a) else ONE
            return _lin([(ONE, _no(self.S_node(a), b)), (sign, _no(a, self.S_node(b)))])
        if kind == "lin":
            return _lin([(c, self.S_node(n)) for c, n in nd[1]])
        raise TypeError(nd)

    def node_parity(self, nd):
        r = self._par.get(nd)
        if r is not None:
            return r
        kind = nd[0]
        if kind == "vac":
            r = 0
        elif kind == "atom":
            r = self.sys.parity[nd[1]]
        elif kind == "T":
            r = self.node_parity(nd[1])
        elif kind == "no":
            r = self.node_parity(nd[1]) ^ self.node_parity(nd[2])
        else:
            ps = {self.node_parity(n) for _, n in nd[1]}
            if len(ps) != 1:
                raise ValueError("inhomogeneous parity in field")
            r = ps.pop()
        self._par[nd] = r
        return r

    def node_weight(self, nd):
        r = self._wt.get(nd)
        if r is not None:
            return r
        kind = nd[0]
        if kind == "vac":
            r = Fraction(0)
        elif kind == "atom":
            r = self.sys.weight[nd[1]]
        elif kind == "T":
            r = self.node_weight(nd[1]) + 1
        elif kind == "no":
            r = self.node_weight(nd[1]) + self.node_weight(nd[2])
        else:
            r = max(self.node_weight(n) for _, n in nd[1])
        self._wt[nd] = r
        return r

    # ------------------------------------------------------------ modes

    def mode_mono(self, nd, n, mono):
        key = (nd, n, mono)
        r = self._memo.get(key)
        if r is not None:
            return r
        r = self._mode_mono(nd, n, mono)
        if self.cutoff is not None:
            for m in r:
                if self.sys.mono_weight(m) > self.cutoff:
                    raise WeightOverflow("state of weight %s exceeds cutoff %s"
                                         % (self.sys.mono_weight(m), self.cutoff))
        self._memo[key] = r
        return r

    def _mode_mono(self, nd, n, mono):
        kind = nd[0]
        w = self.sys.mono_weight(mono)
        if kind == "vac":
            return {mono: ONE} if n == -1 else {}
        if kind == "lin":
            out = {}
            for c, ch in nd[1]:
                _vadd(out, self.mode_mono(ch, n, mono), c)
            return out
        if w + self.node_weight(nd) - n - 1 < 0:
            return {}
        if kind == "atom":
            return self.sys.apply_mode(nd[1], n, mono)
        if kind == "T":
            if n == 0:
                return {}
            out = {}
            _vadd(out, self.mode_mono(nd[1], n - 1, mono), num(-n))
            return out
        # (A_(-1) C)_(n) = Σ_j A_(-1-j) C_(n+j) + (-1)^{AC} Σ_j C_(n-1-j) A_(j)
        A, C = nd[1], nd[2]
        wa, wc = self.node_weight(A), self.node_weight(C)
        sign = -ONE if (self.node_parity(A) and self.node_parity(C)) else ONE
        out = {}
        j = 0
        while w + wc - (n + j) - 1 >= 0:
            mid = self.mode_mono(C, n + j, mono)
            if mid:
                _vadd(out, self.mode_vec(A, -1 - j, mid))
            j += 1
        j = 0
        while w + wa - j - 1 >= 0:
            mid = self.mode_mono(A, j, mono)
            if mid:
                _vadd(out, self.mode_vec(C, n - 1 - j, mid), sign)
            j += 1
        return out

    def mode_vec(self, nd, n, vec):
        out = {}
        for m, c in vec.items():
            _vadd(out, self.mode_mono(nd, n, m), c)
        return out

    def state(self, e):
        nd = e if isinstance(e, tuple) else self.node(e)
        if nd is None:
            return {}
        return self.mode_mono(nd, -1, ())

    def T_vec(self, vec):
        """Translation operator: [T, x_(n)] = -n x_(n-1), T|0> = 0."""
        out = {}
        for mono, c in vec.items():
            for k, (x, n) in enumerate(mono):
                new = mono[:k] + mono[k + 1:]
                piece = self.sys.apply_mode(x, n - 1, new)
                # creator at position k moved to the front first
                odd = sum(self.sys.parity[y] for y, _ in mono[:k])
                s = -ONE if (self.sys.parity[x] and odd % 2) else ONE
                _vadd(out, piece, c * s * num(-n))
        return out

    # ------------------------------------------------------------ brackets

    def super_mode(self, e, j, J):
        """Component tree whose ordinary (j)-mode is the SUSY mode (j|J)."""
        nd = self.node(e)
        if nd is None:
            return None
        return nd if J == 1 else self.S_node(nd)

    def commutator_structure(self, a, b, max_j=None):
        """{(j, J): state} with a_(j|J) b, extracted as [A, b_(-1)]|0>.

        With a cutoff, coefficients whose weight lies above it are not
        representable; their keys are collected in ``self.beyond``.  A
        representable coefficient whose evaluation needs states above the
        cutoff raises Underdetermined.
        """
        self.beyond = set()
        na, nb = self.node(a), self.node(b)
        if na is None or nb is None:
            return {}
        bstate = self.state(nb)
        wb = self.node_weight(nb)
        if max_j is None:
            max_j = int(self.node_weight(na) + wb + 1)
        out = {}
        for J in (0, 1):
            A = na if J == 1 else self.S_node(na)
            if A is None:
                continue
            for j in range(max_j + 1):
                if self.cutoff is not None and self.node_weight(A) + wb - j - 1 > self.cutoff:
                    self.beyond.add((j, J))
                    continue
                # A|0> = 0 for j >= 0, so the graded commutator on the vacuum is A b
                try:
                    v = self.mode_vec(A, j, bstate)
                except WeightOverflow as exc:
                    raise Underdetermined("cutoff %s too small for %s_(%d|%d)" % (self.cutoff, a, j, J)) from exc
                if v:
                    out[(j, J)] = v
        return out

    def engine_table_states(self, lp):
        """Engine Λ-bracket {(j, J): canonical state} -> {(j, J): Fock state}."""
        out = {}
        for (j, J), st in lp.items():
            if isinstance(st, dict):
                st = F.State(self.P, st)
            v = self.state(st)
            if v:
                out[(j, J)] = {m: c * num(factorial(j)) for m, c in v.items()}
        return out


def _no(a, b):
    if a is None or b is None:
        return None
    return ("no", a, b)


# -------------------------------------------------------------- basis / matrices

class FockBasis:
    """Monomials of creation modes of positive weight, total weight <= cutoff.

    Zero-weight creation modes (the bare ``B|`` zero momentum direction) are
    left out so that every weight space is finite dimensional.
    """

    def __init__(self, P, cutoff):
        self.P = P
        self.sys = FreeFieldSystem(P)
        self.cutoff = Fraction(cutoff)
        budget = int(os.environ.get(BUDGET_ENV, DEFAULT_BUDGET))
        modes = []
        for x in range(self.sys.ncomp):
            n = -1
            while True:
                w = self.sys.mode_weight(x, n)
                if w > self.cutoff:
                    break
                if w > 0:
                    modes.append(((x, n), w, self.sys.parity[x]))
                n -= 1
        modes.sort()
        states = []

        def rec(i, cur, wt):
            if len(states) > budget:
                raise ResourceError("Fock basis exceeds budget %d (set %s)" % (budget, BUDGET_ENV))
            states.append(tuple(cur))
            for k in range(i, len(modes)):
                lab, w, p = modes[k]
                if wt + w > self.cutoff:
                    continue
                if p and cur and cur[-1] == lab:
                    continue
                cur.append(lab)
                rec(k if not p else k + 1, cur, wt + w)
                cur.pop()

        rec(0, [], Fraction(0))
        states.sort(key=lambda m: (self.sys.mono_weight(m), m))
        self.states = states
        self.index = {m: i for i, m in enumerate(states)}

    def __len__(self):
        return len(self.states)

    def weight(self, i):
        return self.sys.mono_weight(self.states[i])


def build_fock(n_pairs, cutoff):
    """Basis for ``n_pairs`` real free pairs, or for a given presentation."""
    if isinstance(n_pairs, int):
        from .presentations import free_pairs
        P = free_pairs(n_pairs)
    else:
        P = n_pairs
    if Fraction(cutoff) < 0 or (2 * Fraction(cutoff)).denominator != 1:
        raise ValueError("cutoff must be a nonnegative half-integer")
    return FockBasis(P, cutoff)


class FockOperator:
    """Sparse matrix {(row, col): scalar} on a FockBasis."""

    def __init__(self, basis, entries, label="", parity=0, shift=Fraction(0)):
        self.basis = basis
        self.entries = {k: v for k, v in entries.items() if v}
        self.label = label
        self.parity = parity
        self.shift = shift

    def __bool__(self):
        return bool(self.entries)

    def __add__(self, other):
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, ZERO) + v
        return FockOperator(self.basis, out, parity=self.parity, shift=self.shift)

    def __sub__(self, other):
        return self + other.scale(-ONE)

    def scale(self, c):
        c = num(c)
        return FockOperator(self.basis, {k: v * c for k, v in self.entries.items()},
                            self.label, self.parity, self.shift)

    def __matmul__(self, other):
        by_row = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        out = {}
        for (r, k), v in self.entries.items():
            for c, w in by_row.get(k, ()):
                out[(r, c)] = out.get((r, c), ZERO) + v * w
        return FockOperator(self.basis, out, parity=self.parity ^ other.parity,
                            shift=self.shift + other.shift)

    def supercommutator(self, other):
        s = -ONE if (self.parity and other.parity) else ONE
        return (self @ other) - (other @ self).scale(s)

    def nnz(self):
        return len(self.entries)

    def dump(self):
        """Rows of ``row col re im`` with exact rationals."""
        lines = []
        for (r, c) in sorted(self.entries):
            v = self.entries[(r, c)]
            lines.append("%d %d %s %s" % (r, c, v.x, v.y))
        return "\n".join(lines)


def field_to_operator(e, mode, basis, oracle=None, strict=False):
    """Matrix of the (j|J) mode of a field on the truncated basis.

    Components landing above the cutoff are dropped (truncation); with
    ``strict`` they raise WeightOverflow instead.
    """
    j, J = mode
    orc = oracle or Oracle(basis.P)
    nd = orc.node(e)
    if nd is None:
        return FockOperator(basis, {}, label=str(e))
    A = nd if J == 1 else orc.S_node(nd)
    if A is None:
        return FockOperator(basis, {}, label=str(e))
    shift = orc.node_weight(A) - j - 1
    ent = {}
    for col, mono in enumerate(basis.states):
        if basis.weight(col) + shift > basis.cutoff:
            if strict:
                raise WeightOverflow("mode maps weight %s beyond cutoff" % basis.weight(col))
            continue
        for m, v in orc.mode_mono(A, j, mono).items():
            row = basis.index.get(m)
            if row is None:
                if basis.sys.mono_weight(m) <= basis.cutoff:
                    raise ValueError("operator leaves the module (zero-weight mode created)")
                continue
            ent[(row, col)] = v
    return FockOperator(basis, ent, label="%s_(%d|%d)" % (e, j, J),
                        parity=orc.node_parity(A), shift=shift)


def compare_with_engine(a, b, P, oracle=None):
    """Exact difference between engine Λ-bracket and oracle extraction.

    Returns ``(ok, diffs)`` where diffs maps (j, J) to the nonzero Fock
    difference vector.  Keys above the oracle's cutoff are left out.
    """
    orc = oracle or Oracle(P)
    eng = P.engine()
    lp = eng.bracket_states(eng.canon(a), eng.canon(b))
    rhs = orc.commutator_structure(a, b)
    lp = {k: v for k, v in lp.items() if k not in orc.beyond}
    lhs = orc.engine_table_states(lp)
    diffs = {}
    for key in set(lhs) | set(rhs):
        d = _vadd(dict(lhs.get(key, {})), rhs.get(key, {}), -ONE)
        if d:
            diffs[key] = d
    return not diffs, diffs
