"""Formulas: AST, parser, printer, sugar expansion and fragment classification.

Three layers share the node classes below.  The Boolean level talks about
locations of the paths bound by the enclosing temporal operator, the temporal
level is a single (nest-free) path-quantified until/release/... and the top
level combines temporal formulas, parameter comparisons and parameter
quantifiers.

Concrete syntax::

    exists p2. (p2 > p1 & E [pi1, pi2] ((L@pi1 -> H@pi2) U{= p2} (H@pi1 & H@pi2)))
    E<> [pi1] ((COUNT(a@pi1) - COUNT(b@pi1)) mod 4 in {0, 1, 3})
    A[]{<= 5} [pi] (~Err@pi)
    E [pi1, pi2] (true U (LAST(H@pi1) - LAST(H@pi2) > p))
"""

from dataclasses import dataclass
import re

from .model import RELATIONS, LinearTerm, ModelError, format_linear


class FormulaError(ModelError):
    pass


class NestedTemporalError(FormulaError):
    pass


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class FalseF:
    pass


@dataclass(frozen=True)
class Prop:
    name: str
    path: str


@dataclass(frozen=True)
class Last:
    """LAST(s1@pi1) - LAST(s2@pi2) rel lt"""
    s1: str
    pi1: str
    s2: str
    pi2: str
    rel: str
    lt: LinearTerm


@dataclass(frozen=True)
class CountGe:
    """sum(a * COUNT(s@pi)) rel d with natural coefficients."""
    terms: tuple  # ((prop, path, coeff), ...)
    rel: str
    d: int


@dataclass(frozen=True)
class CountMod:
    """(sum(a * COUNT(s@pi)) mod n) rel d with integer coefficients."""
    terms: tuple
    n: int
    rel: str
    d: int


@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Implies:
    left: object
    right: object


@dataclass(frozen=True)
class Iff:
    left: object
    right: object


@dataclass(frozen=True)
class Xor:
    left: object
    right: object


@dataclass(frozen=True)
class Temporal:
    """quant in {E, A}; kind in {U, R, W, F, G}; F/G keep the operand in ``rhs``."""
    quant: str
    paths: tuple
    kind: str
    bound: object  # None or (rel, gamma) with gamma an int or a parameter name
    lhs: object
    rhs: object


@dataclass(frozen=True)
class ParamCmp:
    param: str
    rel: str
    lt: LinearTerm


@dataclass(frozen=True)
class Exists:
    param: str
    body: object


@dataclass(frozen=True)
class Forall:
    param: str
    body: object


EXT = (Last, CountGe, CountMod)
BINARY = (Or, And, Implies, Iff, Xor)
ATOMS = (TrueF, FalseF, Prop, Last, CountGe, CountMod)


def count_paths(terms):
    return {pi for _, pi, a in terms if a}


# ---------------------------------------------------------------------------
# tokenizer and parser

_TOKEN = re.compile(r"""
    (?P<ws>\s+) | (?P<comment>\#[^\n]*) |
    (?P<num>\d+) | (?P<id>[A-Za-z_][A-Za-z0-9_']*) |
    (?P<op><>|\[\]|->|!=|<=|>=|[<>=~&|()\[\]{},.@*+\-]) | (?P<bad>.)
""", re.X)

KEYWORDS = {"E", "A", "U", "R", "W", "mod", "in", "COUNT", "LAST", "true",
            "false", "exists", "forall"}


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = []
        for m in _TOKEN.finditer(text):
            kind = m.lastgroup
            if kind in ("ws", "comment"):
                continue
            if kind == "bad":
                raise self._err("unexpected character %r" % m.group(), m.start())
            self.toks.append((kind, m.group(), m.start()))
        self.toks.append(("eof", "", len(text)))
        self.i = 0
        self.scopes = []

    def _err(self, msg, pos=None):
        if pos is None:
            pos = self.toks[self.i][2]
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return FormulaError(msg, line, col)

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.i]
        if t[0] != "eof":
            self.i += 1
        return t

    def accept(self, v):
        if self.peek()[1] == v and self.peek()[0] != "eof":
            self.i += 1
            return True
        return False

    def expect(self, v):
        t = self.peek()
        if t[1] != v or t[0] == "eof":
            raise self._err("expected %r, found %r" % (v, t[1] or "end of input"))
        return self.next()

    def ident(self):
        t = self.peek()
        if t[0] != "id" or t[1] in KEYWORDS:
            raise self._err("expected identifier, found %r" % (t[1] or "end of input"))
        return self.next()[1]

    def number(self):
        t = self.peek()
        if t[0] != "num":
            raise self._err("expected a natural number, found %r" % (t[1] or "end of input"))
        return int(self.next()[1])

    def relation(self):
        t = self.peek()
        if t[1] not in RELATIONS:
            raise self._err("expected a relation, found %r" % (t[1] or "end of input"))
        return self.next()[1]

    # top level --------------------------------------------------------------

    def parse(self):
        f = self.formula(top=True)
        if self.peek()[0] != "eof":
            raise self._err("unexpected %r" % self.peek()[1])
        return f

    def formula(self, top):
        t = self.peek()
        if t[1] in ("exists", "forall"):
            if not top:
                raise self._err("parameter quantifiers are only allowed at the top level")
            self.next()
            p = self.ident()
            self.expect(".")
            body = self.formula(top)
            return Exists(p, body) if t[1] == "exists" else Forall(p, body)
        return self.iff(top)

    def iff(self, top):
        left = self.implies(top)
        while self.peek()[1] in ("=", "!="):
            op = self.next()[1]
            right = self.implies(top)
            left = Iff(left, right) if op == "=" else Xor(left, right)
        return left

    def implies(self, top):
        left = self.disj(top)
        if self.accept("->"):
            return Implies(left, self.implies(top))
        return left

    def disj(self, top):
        left = self.conj(top)
        while self.accept("|"):
            left = Or(left, self.conj(top))
        return left

    def conj(self, top):
        left = self.unary(top)
        while self.accept("&"):
            left = And(left, self.unary(top))
        return left

    def unary(self, top):
        if self.accept("~"):
            return Not(self.unary(top))
        t = self.peek()
        if t[1] in ("exists", "forall"):
            return self.formula(top)
        return self.primary(top)

    def primary(self, top):
        t = self.peek()
        if t[1] in ("E", "A") and t[0] == "id":
            node = self.temporal()
            if not top:
                raise NestedTemporalError(
                    "nested temporal operators are not supported (nest-free fragment only)",
                    *self._pos(t[2]))
            return node
        if t[1] == "(":
            save = self.i
            try:
                return self.count_atom()
            except FormulaError as exc:
                if getattr(exc, "committed", False):
                    raise
                self.i = save
            self.next()
            f = self.formula(top)
            self.expect(")")
            return f
        if t[1] == "true":
            self.next()
            return TrueF()
        if t[1] == "false":
            self.next()
            return FalseF()
        if t[1] == "LAST":
            return self.last_atom()
        if t[1] == "COUNT" or t[0] == "num" or (t[1] == "-" and self.peek(1)[0] == "num"):
            return self.count_atom()
        if t[0] == "id" and t[1] not in KEYWORDS:
            if self.peek(1)[1] == "@":
                name = self.next()[1]
                self.next()
                return Prop(name, self.pathvar())
            if self.peek(1)[1] in RELATIONS:
                if not top:
                    raise self._err("parameter comparisons are only allowed at the top level")
                p = self.next()[1]
                rel = self.relation()
                lt = self.linear_term()
                if not lt.is_nonneg():
                    raise self._err("right-hand side of a parameter comparison must be a "
                                    "non-negative linear term")
                return ParamCmp(p, rel, lt)
        raise self._err("unexpected %r" % (t[1] or "end of input"))

    def _pos(self, pos):
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def pathvar(self):
        return self.ident()

    def bound(self):
        if not self.accept("{"):
            return None
        rel = self.relation()
        t = self.peek()
        if t[0] == "num":
            gamma = self.number()
        else:
            gamma = self.ident()
        self.expect("}")
        return (rel, gamma)

    def binders(self):
        self.expect("[")
        paths = [self.pathvar()]
        while self.accept(","):
            paths.append(self.pathvar())
        self.expect("]")
        if len(set(paths)) != len(paths):
            raise self._err("duplicate path variable in binder")
        for scope in self.scopes:
            for p in paths:
                if p in scope:
                    raise self._err("path variable %r is already bound" % p)
        return tuple(paths)

    def temporal(self):
        quant = self.next()[1]
        op = self.peek()[1]
        if op in ("<>", "[]"):
            self.next()
            kind = "F" if op == "<>" else "G"
            bnd = self.bound()
            paths = self.binders()
            self.scopes.append(paths)
            try:
                arg = self.unary(False)
            finally:
                self.scopes.pop()
            return Temporal(quant, paths, kind, bnd, None, arg)
        paths = self.binders()
        self.scopes.append(paths)
        try:
            self.expect("(")
            lhs = self.formula(False)
            kt = self.peek()
            if kt[1] not in ("U", "R", "W"):
                raise self._err("expected U, R or W, found %r" % (kt[1] or "end of input"))
            self.next()
            bnd = self.bound()
            rhs = self.formula(False)
            self.expect(")")
        finally:
            self.scopes.pop()
        return Temporal(quant, paths, kt[1], bnd, lhs, rhs)

    def linear_term(self):
        coeffs, const = {}, 0
        sign = -1 if self.accept("-") else 1
        while True:
            t = self.peek()
            if t[0] == "num":
                k = int(self.next()[1])
                if self.accept("*"):
                    p = self.ident()
                    coeffs[p] = coeffs.get(p, 0) + sign * k
                else:
                    const += sign * k
            elif t[0] == "id" and t[1] not in KEYWORDS:
                p = self.next()[1]
                k = 1
                if self.accept("*"):
                    k = self.number()
                coeffs[p] = coeffs.get(p, 0) + sign * k
            else:
                raise self._err("expected a linear term, found %r" % (t[1] or "end of input"))
            if self.accept("+"):
                sign = 1
            elif self.accept("-"):
                sign = -1
            else:
                return LinearTerm.make(coeffs, const)

    def last_atom(self):
        s1, pi1 = self.last_ref()
        self.expect("-")
        s2, pi2 = self.last_ref()
        rel = self.relation()
        return Last(s1, pi1, s2, pi2, rel, self.linear_term())

    def last_ref(self):
        self.expect("LAST")
        self.expect("(")
        s = self.ident()
        self.expect("@")
        pi = self.pathvar()
        self.expect(")")
        return s, pi

    def count_comb(self):
        terms = {}
        sign = -1 if self.accept("-") else 1
        while True:
            k = 1
            if self.peek()[0] == "num":
                k = self.number()
                self.expect("*")
            self.expect("COUNT")
            self.expect("(")
            s = self.ident()
            self.expect("@")
            pi = self.pathvar()
            self.expect(")")
            terms[(s, pi)] = terms.get((s, pi), 0) + sign * k
            if self.accept("+"):
                sign = 1
            elif self.accept("-"):
                sign = -1
            else:
                break
        return tuple(sorted((s, pi, a) for (s, pi), a in terms.items() if a))

    def count_atom(self):
        if self.accept("("):
            terms = self.count_comb()
            self.expect(")")
            if self.peek()[1] != "mod":
                raise self._err("expected 'mod' after a parenthesised COUNT combination")
        else:
            terms = self.count_comb()
        if self.peek()[1] == "mod":
            start = self.next()[2]
            try:
                n = self.number()
                if n == 0:
                    raise self._err("modulus must be at least 1", start)
                if self.accept("in"):
                    self.expect("{")
                    ds = [self.number()]
                    while self.accept(","):
                        ds.append(self.number())
                    self.expect("}")
                    out = CountMod(terms, n, "=", ds[0])
                    for d in ds[1:]:
                        out = Or(out, CountMod(terms, n, "=", d))
                    return out
                rel = self.relation()
                return CountMod(terms, n, rel, self.number())
            except FormulaError as exc:
                exc.committed = True
                raise
        rel = self.relation()
        d = self.number()
        if any(a < 0 for _, _, a in terms):
            exc = self._err("COUNT coefficients must be non-negative outside 'mod'")
            exc.committed = True
            raise exc
        return CountGe(terms, rel, d)


def parse_formula(text):
    """Parse concrete syntax into an AST; errors carry line and column."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# printing


def _count_text(terms):
    out = ""
    for s, pi, a in terms:
        mag = abs(a)
        piece = ("COUNT(%s@%s)" % (s, pi)) if mag == 1 else ("%d*COUNT(%s@%s)" % (mag, s, pi))
        if not out:
            out = piece if a > 0 else "-" + piece
        else:
            out += (" + " if a > 0 else " - ") + piece
    return out or "0"


def _bound_text(b):
    return "" if b is None else "{%s %s}" % b


_BIN = {Or: "|", And: "&", Implies: "->", Iff: "=", Xor: "!="}


def to_text(f):
    """Fully parenthesised concrete syntax; parse(to_text(f)) == f."""
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Prop):
        return "%s@%s" % (f.name, f.path)
    if isinstance(f, Last):
        return "LAST(%s@%s) - LAST(%s@%s) %s %s" % (f.s1, f.pi1, f.s2, f.pi2, f.rel, f.lt)
    if isinstance(f, CountGe):
        return "%s %s %d" % (_count_text(f.terms), f.rel, f.d)
    if isinstance(f, CountMod):
        return "(%s) mod %d %s %d" % (_count_text(f.terms), f.n, f.rel, f.d)
    if isinstance(f, Not):
        return "~(%s)" % to_text(f.arg)
    if isinstance(f, BINARY):
        return "(%s %s %s)" % (to_text(f.left), _BIN[type(f)], to_text(f.right))
    if isinstance(f, Temporal):
        paths = "[%s]" % ", ".join(f.paths)
        if f.kind in ("F", "G"):
            op = "<>" if f.kind == "F" else "[]"
            return "%s%s%s %s (%s)" % (f.quant, op, _bound_text(f.bound), paths, to_text(f.rhs))
        return "%s %s (%s %s%s %s)" % (f.quant, paths, to_text(f.lhs), f.kind,
                                       _bound_text(f.bound), to_text(f.rhs))
    if isinstance(f, ParamCmp):
        return "%s %s %s" % (f.param, f.rel, f.lt)
    if isinstance(f, Exists):
        return "(exists %s. %s)" % (f.param, to_text(f.body))
    if isinstance(f, Forall):
        return "(forall %s. %s)" % (f.param, to_text(f.body))
    raise TypeError("not a formula: %r" % (f,))


# ---------------------------------------------------------------------------
# sugar


def desugar(f):
    """Rewrite into ⊤, atoms, ¬, ∨, ∃U, ∀U, parameter comparisons and ∃̃ only."""
    if isinstance(f, (TrueF, Prop, Last, CountGe, CountMod, ParamCmp)):
        return f
    if isinstance(f, FalseF):
        return Not(TrueF())
    if isinstance(f, Not):
        return Not(desugar(f.arg))
    if isinstance(f, Or):
        return Or(desugar(f.left), desugar(f.right))
    if isinstance(f, And):
        return Not(Or(Not(desugar(f.left)), Not(desugar(f.right))))
    if isinstance(f, Implies):
        return Or(Not(desugar(f.left)), desugar(f.right))
    if isinstance(f, Iff):
        a, b = f.left, f.right
        return desugar(Or(And(a, b), And(Not(a), Not(b))))
    if isinstance(f, Xor):
        return Not(desugar(Iff(f.left, f.right)))
    if isinstance(f, Exists):
        return Exists(f.param, desugar(f.body))
    if isinstance(f, Forall):
        return Not(Exists(f.param, Not(desugar(f.body))))
    if isinstance(f, Temporal):
        q, ps, b = f.quant, f.paths, f.bound
        if f.kind == "U":
            return Temporal(q, ps, "U", b, desugar(f.lhs), desugar(f.rhs))
        if f.kind == "R":
            other = "A" if q == "E" else "E"
            return Not(Temporal(other, ps, "U", b, desugar(Not(f.lhs)), desugar(Not(f.rhs))))
        if f.kind == "W":
            return desugar(Temporal(q, ps, "R", b, f.rhs, Or(f.lhs, f.rhs)))
        if f.kind == "F":
            return Temporal(q, ps, "U", b, TrueF(), desugar(f.rhs))
        if f.kind == "G":
            return desugar(Temporal(q, ps, "R", b, FalseF(), f.rhs))
    raise TypeError("not a formula: %r" % (f,))


def is_core(f):
    if isinstance(f, (TrueF, Prop, Last, CountGe, CountMod, ParamCmp)):
        return True
    if isinstance(f, Not):
        return is_core(f.arg)
    if isinstance(f, Or):
        return is_core(f.left) and is_core(f.right)
    if isinstance(f, Exists):
        return is_core(f.body)
    if isinstance(f, Temporal):
        return f.kind == "U" and is_core(f.lhs) and is_core(f.rhs)
    return False


# ---------------------------------------------------------------------------
# traversal helpers


def children(f):
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, (Exists, Forall)):
        return (f.body,)
    if isinstance(f, Temporal):
        return tuple(x for x in (f.lhs, f.rhs) if x is not None)
    return ()


def walk(f):
    yield f
    for c in children(f):
        yield from walk(c)


def atom_paths(a):
    if isinstance(a, Prop):
        return [a.path]
    if isinstance(a, Last):
        return [a.pi1, a.pi2]
    if isinstance(a, (CountGe, CountMod)):
        return [pi for _, pi, _ in a.terms]
    return []


def free_path_vars(f):
    """Path variables not bound by an enclosing temporal operator, in order of occurrence."""
    out = []

    def go(g, bound):
        if isinstance(g, Temporal):
            bound = bound | set(g.paths)
        for pi in atom_paths(g):
            if pi not in bound and pi not in out:
                out.append(pi)
        for c in children(g):
            go(c, bound)

    go(f, set())
    return tuple(out)


def bound_path_vars(f):
    out = []
    for g in walk(f):
        if isinstance(g, Temporal):
            for pi in g.paths:
                if pi not in out:
                    out.append(pi)
    return tuple(out)


def path_vars(f):
    """All path variables in order of first binding (or use) occurrence."""
    out = []
    for g in walk(f):
        names = list(g.paths) if isinstance(g, Temporal) else atom_paths(g)
        for pi in names:
            if pi not in out:
                out.append(pi)
    return tuple(out)


def formula_params(f):
    """Parameters mentioned anywhere (bounds, LAST terms, comparisons, binders)."""
    out = []

    def add(p):
        if p not in out:
            out.append(p)

    for g in walk(f):
        if isinstance(g, Temporal) and g.bound is not None and isinstance(g.bound[1], str):
            add(g.bound[1])
        elif isinstance(g, Last):
            for p in g.lt.params:
                add(p)
        elif isinstance(g, ParamCmp):
            add(g.param)
            for p in g.lt.params:
                add(p)
        elif isinstance(g, (Exists, Forall)):
            add(g.param)
    return tuple(out)


def ext_predicates(f):
    """Distinct LAST/COUNT predicates in order of first occurrence."""
    out = []
    for g in walk(f):
        if isinstance(g, EXT) and g not in out:
            out.append(g)
    return out


def temporal_nodes(f):
    return [g for g in walk(f) if isinstance(g, Temporal)]


def check_nest_free(f):
    for t in temporal_nodes(f):
        for side in (t.lhs, t.rhs):
            if side is not None and temporal_nodes(side):
                raise NestedTemporalError("nested temporal operators are not supported")
            if side is not None:
                for g in walk(side):
                    if isinstance(g, (ParamCmp, Exists, Forall)):
                        raise FormulaError("top-level construct inside a temporal operator")


# ---------------------------------------------------------------------------
# fragment classification


@dataclass(frozen=True)
class FragmentReport:
    model_is_LU: bool
    lower_params: tuple
    upper_params: tuple
    model_nonparametric: bool
    model_has_invariants: bool
    model_in_pta_class: bool
    parametric_clocks: int
    model_param_count: int
    formula_params_in_ext: bool
    formula_count_atoms_simple: bool
    formula_integer_params_only: bool
    formula_nonparametric: bool
    formula_only_exists_diamond: bool
    alternation_free_param_quantifiers: bool
    max_paths_per_temporal: int
    discrete_time: bool
    verdict: str
    verdict_class: str
    also: tuple

    def as_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    def text(self):
        lines = []
        for k in self.__dataclass_fields__:
            v = getattr(self, k)
            if isinstance(v, tuple):
                v = ", ".join(v) if v else "-"
            lines.append("%s: %s" % (k, v))
        return "\n".join(lines)


def param_polarity(A):
    """Map each parameter to the set {"lower", "upper"} of its uses in A."""
    use = {p: set() for p in A.params}
    guards = [loc.invariant for loc in A.locations] + [e.guard for e in A.edges]
    for g in guards:
        for a in g.atoms:
            for p, k in a.rhs.coeffs:
                if a.rel == "=":
                    use[p] |= {"lower", "upper"}
                elif (a.rel in ("<", "<=")) == (k > 0):
                    use[p].add("upper")
                else:
                    use[p].add("lower")
    return use


def _model_in_class(A):
    for g in [loc.invariant for loc in A.locations] + [e.guard for e in A.edges]:
        for a in g.atoms:
            if len(a.lhs) != 1:
                return False
            r = a.rhs
            if r.coeffs and (len(r.coeffs) != 1 or r.coeffs[0][1] != 1 or r.const != 0):
                return False
            if not r.coeffs and (r.const < 0 or r.const.denominator != 1):
                return False
    return True


def _quantifiers_alternation_free(f):
    """All parameter quantifiers are existential under an even number of negations."""
    ok = True

    def go(g, neg):
        nonlocal ok
        if isinstance(g, Exists) and neg:
            ok = False
        if isinstance(g, Forall) and not neg:
            ok = False
        if isinstance(g, Not):
            go(g.arg, not neg)
            return
        if isinstance(g, (Implies,)):
            go(g.left, not neg)
            go(g.right, neg)
            return
        if isinstance(g, (Iff, Xor)):
            if any(isinstance(x, (Exists, Forall)) for x in walk(g)):
                ok = False
            return
        for c in children(g):
            go(c, neg)

    go(f, False)
    return ok


def classify_fragment(A, psi, integer_params=True, time="dense"):
    """Flags and the decidability verdict for the pair (model, formula)."""
    pol = param_polarity(A)
    lower = tuple(p for p in A.params if pol[p] == {"lower"})
    upper = tuple(p for p in A.params if pol[p] == {"upper"})
    unused = tuple(p for p in A.params if not pol[p])
    is_lu = len(lower) + len(upper) + len(unused) == len(A.params)
    nonparam = not any(pol[p] for p in A.params)
    has_inv = any(not loc.invariant.is_true() for loc in A.locations)
    pclocks = set()
    for g in [loc.invariant for loc in A.locations] + [e.guard for e in A.edges]:
        for a in g.atoms:
            if a.rhs.coeffs:
                pclocks.update(a.lhs)
    used_params = [p for p in A.params if pol[p]]
    temps = temporal_nodes(psi)
    params_in_ext = any(isinstance(g, Last) and g.lt.coeffs for g in walk(psi))
    simple_counts = True
    for g in walk(psi):
        if isinstance(g, CountMod):
            simple_counts = False
        elif isinstance(g, CountGe) and not (len(g.terms) == 1 and g.terms[0][2] == 1):
            simple_counts = False
    f_nonparam = not formula_params(psi)
    only_ef = all(t.quant == "E" and (t.kind == "F" or (t.kind == "U" and isinstance(t.lhs, TrueF)))
                  for t in temps)
    alt_free = _quantifiers_alternation_free(psi)
    max_paths = max([len(t.paths) for t in temps], default=0)
    discrete = time == "discrete"
    in_class = _model_in_class(A)

    verdicts = []
    if nonparam and not params_in_ext and simple_counts and integer_params:
        verdicts.append(("TA+RP", "decidable: non-parametric model, formula with parameters "
                         "only outside LAST/COUNT (model checking in 6-NEXPTIME)"))
    if nonparam:
        verdicts.append(("TA", "decidable: non-parametric model, synthesis effectively computable"))
    if is_lu and in_class and f_nonparam and only_ef:
        verdicts.append(("LU+EF", "decidable: L/U model with non-parametric existential "
                         "reachability formula (PSPACE-complete)"))
    if is_lu and in_class and not has_inv and integer_params and f_nonparam:
        verdicts.append(("LU-noinv", "decidable: L/U model without invariants, integer "
                         "parameters, non-parametric formula (PSPACE-complete)"))
    if discrete and len(pclocks) <= 1 and len(used_params) <= 1 and f_nonparam and only_ef \
            and max_paths <= 2 and in_class:
        verdicts.append(("1-clock-discrete", "decidable over discrete time: one parametric "
                         "clock, one parameter, non-parametric reachability with at most two "
                         "path quantifiers"))
    if verdicts:
        cls, text = verdicts[0]
        also = tuple(v[0] for v in verdicts[1:])
    else:
        cls, text, also = "none", "semi-algorithm only", ()
    return FragmentReport(
        model_is_LU=is_lu, lower_params=lower, upper_params=upper,
        model_nonparametric=nonparam, model_has_invariants=has_inv,
        model_in_pta_class=in_class, parametric_clocks=len(pclocks),
        model_param_count=len(used_params),
        formula_params_in_ext=params_in_ext, formula_count_atoms_simple=simple_counts,
        formula_integer_params_only=bool(integer_params), formula_nonparametric=f_nonparam,
        formula_only_exists_diamond=only_ef, alternation_free_param_quantifiers=alt_free,
        max_paths_per_temporal=max_paths, discrete_time=discrete,
        verdict=text, verdict_class=cls, also=also)
