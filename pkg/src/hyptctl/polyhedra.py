"""Exact convex polyhedra over the rationals and finite unions of them.

Constraints are stored as integer rows over a fixed variable tuple.  A row
``(coeffs, const, strict)`` means ``sum(coeffs[i] * vars[i]) + const < 0`` when
``strict`` and ``<= 0`` otherwise; an equality row ``(coeffs, const)`` means
``... = 0``.  Emptiness, projection and inclusion all go through
Fourier-Motzkin elimination with Chernikov's history rule, which keeps strict
and non-strict bounds exact.

The pairing step of the elimination is the hot loop.  A compiled version is
used when the extension was built and the pure-Python kernel otherwise.
"""

from fractions import Fraction
from functools import reduce as _fold
from math import ceil, floor, gcd
import json

from . import _fm_py

try:
    from . import _fm_core as _fm_fast
except ImportError:  # extension not built
    _fm_fast = None

_kernel = _fm_fast if _fm_fast is not None else _fm_py


def kernel_name():
    return "cython" if _kernel is _fm_fast and _fm_fast is not None else "python"


def set_kernel(name):
    """Select the pairing kernel ("python" or "cython"); returns the previous name."""
    global _kernel
    prev = kernel_name()
    if name == "cython":
        if _fm_fast is None:
            raise RuntimeError("compiled kernel is not available")
        _kernel = _fm_fast
    elif name == "python":
        _kernel = _fm_py
    else:
        raise ValueError("unknown kernel %r" % (name,))
    return prev


class PolyError(Exception):
    pass


# ---------------------------------------------------------------------------
# Linear expressions and constraints (the user-facing layer)


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted; use Fraction")
    return Fraction(x)


class Lin:
    """Linear expression ``sum(coeffs[v] * v) + const`` with rational coefficients."""

    __slots__ = ("coeffs", "const")

    def __init__(self, coeffs=None, const=0):
        self.coeffs = {v: _frac(a) for v, a in (coeffs or {}).items() if a != 0}
        self.const = _frac(const)

    @classmethod
    def var(cls, name):
        return cls({name: 1})

    @staticmethod
    def lift(x):
        return x if isinstance(x, Lin) else Lin(const=x)

    def __add__(self, other):
        other = Lin.lift(other)
        coeffs = dict(self.coeffs)
        for v, a in other.coeffs.items():
            coeffs[v] = coeffs.get(v, 0) + a
        return Lin(coeffs, self.const + other.const)

    __radd__ = __add__

    def __neg__(self):
        return Lin({v: -a for v, a in self.coeffs.items()}, -self.const)

    def __sub__(self, other):
        return self + (-Lin.lift(other))

    def __rsub__(self, other):
        return Lin.lift(other) - self

    def __mul__(self, k):
        k = _frac(k)
        return Lin({v: a * k for v, a in self.coeffs.items()}, self.const * k)

    __rmul__ = __mul__

    def le(self, other):
        return LinIneq(self - other, "<=")

    def lt(self, other):
        return LinIneq(self - other, "<")

    def ge(self, other):
        return LinIneq(self - other, ">=")

    def gt(self, other):
        return LinIneq(self - other, ">")

    def eq(self, other):
        return LinIneq(self - other, "=")

    def value(self, point):
        return self.const + sum(a * _frac(point[v]) for v, a in self.coeffs.items())

    def __repr__(self):
        return "Lin(%r, %r)" % (self.coeffs, self.const)


_FLIP = {"<": ">", "<=": ">=", "=": "=", ">=": "<=", ">": "<"}


class LinIneq:
    """``expr rel 0`` with ``rel`` in {<, <=, =}; ``>``/``>=`` are stored negated."""

    __slots__ = ("expr", "rel")

    def __init__(self, expr, rel):
        if rel in (">", ">="):
            expr, rel = -expr, _FLIP[rel]
        if rel not in ("<", "<=", "="):
            raise PolyError("unknown relation %r" % (rel,))
        self.expr = expr
        self.rel = rel

    def holds(self, point):
        x = self.expr.value(point)
        return x < 0 if self.rel == "<" else x <= 0 if self.rel == "<=" else x == 0

    def negated(self):
        """List of constraints whose union is the complement."""
        if self.rel == "<":
            return [LinIneq(-self.expr, "<=")]
        if self.rel == "<=":
            return [LinIneq(-self.expr, "<")]
        return [LinIneq(self.expr, "<"), LinIneq(-self.expr, "<")]

    def __repr__(self):
        return "LinIneq(%r %s 0)" % (self.expr, self.rel)


# ---------------------------------------------------------------------------
# Integer row helpers


def _to_int_row(expr, variables):
    index = {v: i for i, v in enumerate(variables)}
    for v in expr.coeffs:
        if v not in index:
            raise PolyError("variable %r is not in the universe %r" % (v, variables))
    den = 1
    for a in list(expr.coeffs.values()) + [expr.const]:
        den = den * a.denominator // gcd(den, a.denominator)
    coeffs = [0] * len(variables)
    for v, a in expr.coeffs.items():
        coeffs[index[v]] = int(a * den)
    return tuple(coeffs), int(expr.const * den)


def _norm_eq(coeffs, const):
    return _kernel.norm_eq(coeffs, const)


def _tidy(ineqs, eqs, make_eqs=True):
    """Drop trivial rows, keep the tightest row per direction, detect clashes.

    ``ineqs`` may carry a 4th ancestry field which is preserved.  Returns
    ``None`` when a contradiction was found.
    """
    return _kernel.tidy(ineqs, eqs, make_eqs)


def _substitute_eq(row_c, row_k, e_c, e_k, j):
    """Combine a row with an equality so that coefficient j vanishes.

    The multiplier on the row is positive, so the relation is kept.
    """
    a, b = e_c[j], row_c[j]
    if a < 0:
        e_c, e_k, a = tuple(-x for x in e_c), -e_k, -a
    coeffs = tuple(a * x - b * y for x, y in zip(row_c, e_c))
    return _kernel.normalize(coeffs, a * row_k - b * e_k)


def _eliminate_rows(ineqs, eqs, js, chernikov=True):
    """Existentially project the variables ``js`` out of the system.

    Returns ``(ineqs, eqs)`` with zero coefficients on ``js`` or ``None`` if
    the system is empty.
    """
    ineqs = [(c, k, s) for c, k, s in ineqs]
    eqs = list(eqs)
    todo = [j for j in js]
    progress = True
    while progress:
        progress = False
        for j in todo:
            e = next((e for e in eqs if e[0][j] != 0), None)
            if e is None:
                continue
            eqs.remove(e)
            new_eqs = []
            for c, k in eqs:
                if c[j]:
                    c, k = _substitute_eq(c, k, e[0], e[1], j)
                new_eqs.append((c, k))
            new_ineqs = []
            for c, k, s in ineqs:
                if c[j]:
                    c, k = _substitute_eq(c, k, e[0], e[1], j)
                new_ineqs.append((c, k, s))
            t = _tidy(new_ineqs, new_eqs)
            if t is None:
                return None
            ineqs, eqs = t
            todo.remove(j)
            progress = True
            break
    keep_eqs = []
    for c, k in eqs:
        if any(c[j] for j in todo):
            ineqs.append((c, k, False))
            ineqs.append((tuple(-a for a in c), -k, False))
        else:
            keep_eqs.append((c, k))
    eqs = keep_eqs
    rows = [(c, k, s, 1 << i) for i, (c, k, s) in enumerate(ineqs)]
    done = 0
    todo = [j for j in todo if any(r[0][j] for r in rows)]
    while todo:
        best_j, best_cost = None, None
        for j in todo:
            p = sum(1 for r in rows if r[0][j] > 0)
            n = sum(1 for r in rows if r[0][j] < 0)
            cost = p * n - p - n
            if best_cost is None or cost < best_cost:
                best_j, best_cost = j, cost
        j = best_j
        todo.remove(j)
        pos = [r for r in rows if r[0][j] > 0]
        neg = [r for r in rows if r[0][j] < 0]
        rest = [r for r in rows if r[0][j] == 0]
        done += 1
        limit = done + 1 if chernikov else -1
        rest.extend(_kernel.combine(pos, neg, j, limit))
        t = _tidy(rest, (), make_eqs=False)
        if t is None:
            return None
        rows = t[0]
    t = _tidy(rows, eqs)
    if t is None:
        return None
    return [(c, k, s) for c, k, s, *_ in t[0]], t[1]


# ---------------------------------------------------------------------------
# Convex polyhedra


class ConvexPoly:
    """A conjunction of linear constraints over a declared variable tuple."""

    __slots__ = ("vars", "ineqs", "eqs", "_empty", "_hash")

    def __init__(self, variables, ineqs=(), eqs=(), _raw=False):
        self.vars = tuple(variables)
        self._hash = None
        self._empty = None
        if _raw:
            self.ineqs, self.eqs = tuple(ineqs), tuple(eqs)
            return
        t = _tidy([(tuple(c), k, bool(s)) for c, k, s in ineqs],
                  [(tuple(c), k) for c, k in eqs])
        if t is None:
            self.ineqs = ((tuple(0 for _ in self.vars), 1, False),)
            self.eqs = ()
            self._empty = True
        else:
            self.ineqs = tuple(sorted((c, k, s) for c, k, s, *_ in t[0]))
            self.eqs = tuple(sorted(t[1]))

    # construction -----------------------------------------------------------

    @classmethod
    def universe(cls, variables):
        return cls(variables)

    @classmethod
    def empty(cls, variables):
        n = len(tuple(variables))
        return cls(variables, [((0,) * n, 1, False)])

    @classmethod
    def of(cls, variables, constraints):
        variables = tuple(variables)
        ineqs, eqs = [], []
        for con in constraints:
            c, k = _to_int_row(con.expr, variables)
            if con.rel == "=":
                eqs.append((c, k))
            else:
                ineqs.append((c, k, con.rel == "<"))
        return cls(variables, ineqs, eqs)

    def constraints(self):
        out = []
        for c, k, s in self.ineqs:
            out.append(LinIneq(self._lin(c, k), "<" if s else "<="))
        for c, k in self.eqs:
            out.append(LinIneq(self._lin(c, k), "="))
        return out

    def _lin(self, c, k):
        return Lin({v: a for v, a in zip(self.vars, c) if a}, k)

    # structure --------------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, ConvexPoly) and self.vars == other.vars
                and self.ineqs == other.ineqs and self.eqs == other.eqs)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, self.ineqs, self.eqs))
        return self._hash

    def __repr__(self):
        return "ConvexPoly(%s)" % (self.text(),)

    def _check(self, other):
        if self.vars != other.vars:
            raise PolyError("universe mismatch: %r vs %r" % (self.vars, other.vars))

    def meet(self, other):
        self._check(other)
        return ConvexPoly(self.vars, self.ineqs + other.ineqs, self.eqs + other.eqs)

    def add(self, constraints):
        return self.meet(ConvexPoly.of(self.vars, constraints))

    def add_rows(self, ineqs=(), eqs=()):
        return ConvexPoly(self.vars, self.ineqs + tuple(ineqs), self.eqs + tuple(eqs))

    def embed(self, variables):
        """Re-express over a universe containing all current variables."""
        variables = tuple(variables)
        idx = {v: i for i, v in enumerate(variables)}
        for v in self.vars:
            if v not in idx:
                raise PolyError("cannot embed: %r missing" % (v,))
        pos = [idx[v] for v in self.vars]
        n = len(variables)

        def move(c):
            out = [0] * n
            for i, a in zip(pos, c):
                out[i] = a
            return tuple(out)

        return ConvexPoly(variables, [(move(c), k, s) for c, k, s in self.ineqs],
                          [(move(c), k) for c, k in self.eqs])

    def project(self, keep):
        """Existential projection onto the variables in ``keep`` (new universe)."""
        keep = tuple(keep)
        drop = [i for i, v in enumerate(self.vars) if v not in keep]
        p = self.eliminate([self.vars[i] for i in drop])
        idx = [self.vars.index(v) for v in keep]
        return ConvexPoly(keep, [(tuple(c[i] for i in idx), k, s) for c, k, s in p.ineqs],
                          [(tuple(c[i] for i in idx), k) for c, k in p.eqs])

    # semantics --------------------------------------------------------------

    def eliminate(self, names):
        """Exact existential projection; the eliminated variables become free."""
        if isinstance(names, str):
            names = [names]
        js = []
        for v in names:
            if v not in self.vars:
                raise PolyError("variable %r is not in the universe" % (v,))
            js.append(self.vars.index(v))
        if self._empty:
            return self
        r = _eliminate_rows(self.ineqs, self.eqs, js)
        if r is None:
            return ConvexPoly.empty(self.vars)
        return ConvexPoly(self.vars, r[0], r[1])

    def is_empty(self):
        if self._empty is None:
            r = _eliminate_rows(self.ineqs, self.eqs, range(len(self.vars)))
            self._empty = r is None
        return self._empty

    def contains(self, point):
        vals = [_frac(point[v]) for v in self.vars]
        for c, k, s in self.ineqs:
            x = k + sum(a * b for a, b in zip(c, vals) if a)
            if x > 0 or (s and x == 0):
                return False
        for c, k in self.eqs:
            if k + sum(a * b for a, b in zip(c, vals) if a) != 0:
                return False
        return True

    def implies_row(self, c, k, s):
        """Does every point satisfy ``c.x + k (<|<=) 0``?"""
        neg = (tuple(-a for a in c), -k, not s)
        return ConvexPoly(self.vars, self.ineqs + (neg,), self.eqs).is_empty()

    def includes(self, other):
        """``other`` is a subset of ``self``."""
        self._check(other)
        if other.is_empty():
            return True
        oi = {(c, k, s) for c, k, s in other.ineqs}
        oe = set(other.eqs)
        # equalities first: a missing one is the usual reason for failure
        for c, k in self.eqs:
            if (c, k) in oe:
                continue
            if not (other.implies_row(c, k, False)
                    and other.implies_row(tuple(-a for a in c), -k, False)):
                return False
        for c, k, s in self.ineqs:
            if (c, k, s) in oi:
                continue
            if not other.implies_row(c, k, s):
                return False
        return True

    def minimize(self):
        """Remove every constraint implied by the remaining ones."""
        if self.is_empty():
            return ConvexPoly.empty(self.vars)
        rows = list(self.ineqs)
        i = 0
        while i < len(rows):
            c, k, s = rows[i]
            others = ConvexPoly(self.vars, rows[:i] + rows[i + 1:], self.eqs, _raw=True)
            if others.implies_row(c, k, s):
                rows.pop(i)
            else:
                i += 1
        # make implicit equalities explicit: c.x + k <= 0 tight everywhere
        eqs = list(self.eqs)
        keep = []
        for c, k, s in rows:
            if not s and ConvexPoly(self.vars, rows, eqs, _raw=True).implies_row(
                    tuple(-a for a in c), -k, False):
                eqs.append((c, k))
            else:
                keep.append((c, k, s))
        if len(eqs) != len(self.eqs):
            return ConvexPoly(self.vars, keep, eqs).minimize()
        out = ConvexPoly(self.vars, keep, eqs)
        out._empty = False
        return out

    def sample(self, prefer_integer=True):
        """A rational point inside the polyhedron or ``None`` when empty."""
        if self.is_empty():
            return None
        n = len(self.vars)
        order = list(range(n))
        systems = [(self.ineqs, self.eqs)]
        for m in range(1, n):
            r = _eliminate_rows(self.ineqs, self.eqs, order[:m])
            systems.append(r)
        value = {}
        for m in range(n - 1, -1, -1):
            j = order[m]
            ineqs, eqs = systems[m]
            value[j] = _pick(j, ineqs, eqs, value, prefer_integer)
        return {v: value[i] for i, v in enumerate(self.vars)}

    # output -----------------------------------------------------------------

    def text(self, hide_nonneg=False):
        if self._empty:
            return "false"
        parts = []
        for c, k, s in self.ineqs:
            if hide_nonneg and k == 0 and not s and sum(1 for a in c if a) == 1 \
                    and min(c) == -1:
                continue
            parts.append(_row_text(self.vars, c, k, "<" if s else "<="))
        for c, k in self.eqs:
            parts.append(_row_text(self.vars, c, k, "="))
        return " & ".join(parts) if parts else "true"

    def to_json(self):
        return [{"coeffs": {v: str(a) for v, a in zip(self.vars, c) if a},
                 "const": str(k), "rel": "<" if s else "<="} for c, k, s in self.ineqs] + \
               [{"coeffs": {v: str(a) for v, a in zip(self.vars, c) if a},
                 "const": str(k), "rel": "="} for c, k in self.eqs]


def _pick(j, ineqs, eqs, value, prefer_integer):
    for c, k in eqs:
        if c[j]:
            rest = Fraction(k) + sum(a * value[i] for i, a in enumerate(c) if a and i != j)
            return -rest / c[j]
    lo, lo_s, hi, hi_s = None, False, None, False
    for c, k, s in ineqs:
        a = c[j]
        if not a:
            continue
        rest = Fraction(k) + sum(b * value[i] for i, b in enumerate(c) if b and i != j)
        bound = -rest / a
        if a > 0:
            if hi is None or bound < hi or (bound == hi and s):
                hi, hi_s = bound, s
        elif lo is None or bound > lo or (bound == lo and s):
            lo, lo_s = bound, s
    if lo is None and hi is None:
        return Fraction(0)
    if prefer_integer:
        if lo is None:
            cand = min(0, floor(hi))
            if hi_s and cand == hi:
                cand -= 1
        else:
            cand = floor(lo) + 1 if lo_s else ceil(lo)
        if hi is None or cand < hi or (cand == hi and not hi_s):
            return Fraction(cand)
    if lo is None:
        return hi - 1
    if hi is None:
        return lo + 1
    if lo == hi:
        return lo
    return (lo + hi) / 2


def _fmt_coeff(a, v):
    if a == 1:
        return v
    return "%d*%s" % (a, v)


def _row_text(variables, c, k, rel):
    """Render ``c.x + k rel 0`` as ``lhs rel' rhs`` with positive terms on the left."""
    first = next(a for a in c if a)
    if first < 0:
        c = tuple(-a for a in c)
        k = -k
        rel = {"<": ">", "<=": ">=", "=": "="}[rel]
    left = [_fmt_coeff(a, v) for v, a in zip(variables, c) if a > 0]
    right = [(-a, v) for v, a in zip(variables, c) if a < 0]
    rhs = ""
    for i, (a, v) in enumerate(right):
        rhs += (" + " if i else "") + _fmt_coeff(a, v)
    const = -k
    if rhs and const:
        rhs += (" + %d" % const) if const > 0 else (" - %d" % -const)
    elif not rhs:
        rhs = str(const)
    return "%s %s %s" % (" + ".join(left), rel, rhs)


# ---------------------------------------------------------------------------
# Finite unions over the non-negative parameter orthant


def _orthant_rows(n):
    rows = []
    for i in range(n):
        c = [0] * n
        c[i] = -1
        rows.append((tuple(c), 0, False))
    return rows


def complement_poly(poly):
    """Disjoint pieces whose union is the complement of ``poly`` (whole space)."""
    if poly.is_empty():
        return [ConvexPoly.universe(poly.vars)]
    rows = [(c, k, s) for c, k, s in poly.ineqs]
    for c, k in poly.eqs:
        rows.append((c, k, False))
        rows.append((tuple(-a for a in c), -k, False))
    pieces = []
    prefix = []
    for c, k, s in rows:
        neg = (tuple(-a for a in c), -k, not s)
        piece = ConvexPoly(poly.vars, prefix + [neg])
        if not piece.is_empty():
            pieces.append(piece)
        prefix.append((c, k, s))
    return pieces


class ParamSet:
    """A finite union of convex polyhedra inside the non-negative orthant.

    ``ParamSet.universe(params)`` is the distinguished full domain.
    """

    __slots__ = ("params", "polys", "is_universe", "partial")

    def __init__(self, params, polys=(), is_universe=False, partial=False, _canon=True):
        self.params = tuple(params)
        self.is_universe = bool(is_universe)
        self.partial = partial
        if self.is_universe:
            self.polys = ()
            return
        orth = _orthant_rows(len(self.params))
        out = []
        for p in polys:
            if p.vars != self.params:
                raise PolyError("universe mismatch: %r vs %r" % (p.vars, self.params))
            if _canon:
                p = p.add_rows(orth)
                if p.is_empty():
                    continue
                p = p.minimize()
            out.append(p)
        if _canon:
            out = _drop_subsumed(out)
            out.sort(key=lambda p: p.text())
        self.polys = tuple(out)

    @classmethod
    def universe(cls, params):
        return cls(params, is_universe=True)

    @classmethod
    def empty(cls, params):
        return cls(params)

    @classmethod
    def of(cls, params, *constraint_lists):
        return cls(params, [ConvexPoly.of(params, cl) for cl in constraint_lists])

    def _check(self, other):
        if self.params != other.params:
            raise PolyError("parameter universe mismatch: %r vs %r"
                            % (self.params, other.params))

    def _explicit(self):
        if self.is_universe:
            return [ConvexPoly(self.params, _orthant_rows(len(self.params)))]
        return list(self.polys)

    def is_empty(self):
        return not self.is_universe and not self.polys

    def union(self, other):
        self._check(other)
        if self.is_universe or other.is_universe:
            return ParamSet.universe(self.params)
        return ParamSet(self.params, self.polys + other.polys,
                        partial=self.partial or other.partial)

    def intersect(self, other):
        self._check(other)
        if self.is_universe:
            return other
        if other.is_universe:
            return self
        return ParamSet(self.params, [a.meet(b) for a in self.polys for b in other.polys],
                        partial=self.partial or other.partial)

    def complement(self):
        if self.is_universe:
            return ParamSet.empty(self.params)
        if not self.polys:
            return ParamSet.universe(self.params)
        orth = ConvexPoly(self.params, _orthant_rows(len(self.params)))
        acc = [orth]
        for p in self.polys:
            pieces = complement_poly(p)
            nxt = []
            for a in acc:
                for b in pieces:
                    m = a.meet(b)
                    if not m.is_empty():
                        nxt.append(m)
            acc = _drop_subsumed(nxt)
            if not acc:
                break
        return ParamSet(self.params, acc, partial=self.partial)

    def minus(self, other):
        return self.intersect(other.complement())

    def eliminate(self, param):
        """Existential projection on ``param``, re-embedded unconstrained in the orthant."""
        if self.is_universe:
            return self
        return ParamSet(self.params, [p.eliminate(param) for p in self.polys],
                        partial=self.partial)

    def includes(self, other):
        """``other`` is a subset of ``self``."""
        self._check(other)
        if self.is_universe or other.is_empty():
            return True
        rest = other.intersect(self.complement())
        return rest.is_empty()

    def equals(self, other):
        return self.includes(other) and other.includes(self)

    def contains(self, point):
        if any(_frac(point[p]) < 0 for p in self.params):
            return False
        if self.is_universe:
            return True
        return any(p.contains(point) for p in self.polys)

    def sample(self):
        if self.is_universe:
            return {p: Fraction(0) for p in self.params}
        for p in self.polys:
            pt = p.sample()
            if pt is not None:
                return pt
        return None

    def text(self):
        if self.is_universe:
            return "UNION { true }"
        if not self.polys:
            return "UNION { }"
        return "UNION { " + " , ".join(p.text(hide_nonneg=True) for p in self.polys) + " }"

    __str__ = text

    def __repr__(self):
        return "ParamSet(%s)" % self.text()

    def to_json(self):
        return {"params": list(self.params), "universe": self.is_universe,
                "partial": bool(self.partial),
                "polyhedra": [p.to_json() for p in self.polys], "text": self.text()}

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)


def _drop_subsumed(polys):
    polys = [p for p in dict.fromkeys(polys) if not p.is_empty()]
    out = []
    for i, p in enumerate(polys):
        dominated = False
        for j, q in enumerate(polys):
            if i != j and q.includes(p) and (not p.includes(q) or j < i):
                dominated = True
                break
        if not dominated:
            out.append(p)
    return out


def union_all(params, sets):
    return _fold(lambda a, b: a.union(b), sets, ParamSet.empty(params))
