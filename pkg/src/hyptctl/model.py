"""Parametric timed automata: terms, guards, automata, text format.

Everything here is an immutable value.  Rational numbers are ``Fraction``;
no floating point is accepted.
"""

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import gcd
import re

RELATIONS = ("<", "<=", "=", ">=", ">")
FLIP = {"<": ">", "<=": ">=", "=": "=", ">=": "<=", ">": "<"}
DENSE, DISCRETE = "dense", "discrete"


class ModelError(Exception):
    """Raised on malformed models; ``line``/``col`` point into the source text."""

    def __init__(self, message, line=None, col=None):
        if line is not None:
            message = "%d:%d: %s" % (line, col or 0, message)
        super().__init__(message)
        self.line = line
        self.col = col


class UnknownIdentifier(ModelError):
    def __init__(self, name, kind="identifier", line=None, col=None):
        super().__init__("unknown %s %r" % (kind, name), line, col)
        self.name = name


def compare(a, rel, b):
    if rel == "<":
        return a < b
    if rel == "<=":
        return a <= b
    if rel == "=":
        return a == b
    if rel == ">=":
        return a >= b
    if rel == ">":
        return a > b
    raise ValueError("bad relation %r" % (rel,))


@dataclass(frozen=True)
class LinearTerm:
    """``sum(coeffs) + const``; coefficients are integers, the constant rational."""

    coeffs: tuple = ()
    const: Fraction = Fraction(0)

    @classmethod
    def make(cls, coeffs=None, const=0):
        items = tuple(sorted((p, int(a)) for p, a in (coeffs or {}).items() if a))
        return cls(items, Fraction(const))

    @classmethod
    def param(cls, name):
        return cls(((name, 1),), Fraction(0))

    @property
    def params(self):
        return tuple(p for p, _ in self.coeffs)

    def coeff(self, p):
        for q, a in self.coeffs:
            if q == p:
                return a
        return 0

    def is_constant(self):
        return not self.coeffs

    def is_nonneg(self):
        return self.const >= 0 and all(a >= 0 for _, a in self.coeffs)

    def evaluate(self, v):
        total = self.const
        for p, a in self.coeffs:
            if p not in v:
                raise UnknownIdentifier(p, "parameter")
            total += a * Fraction(v[p])
        return total

    def __add__(self, other):
        d = dict(self.coeffs)
        for p, a in other.coeffs:
            d[p] = d.get(p, 0) + a
        return LinearTerm.make(d, self.const + other.const)

    def __neg__(self):
        return LinearTerm(tuple((p, -a) for p, a in self.coeffs), -self.const)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k):
        return LinearTerm.make({p: a * k for p, a in self.coeffs}, self.const * k)

    def __str__(self):
        return format_linear([(p, a) for p, a in self.coeffs], self.const)


def format_linear(items, const):
    out = ""
    for p, a in items:
        if not a:
            continue
        mag = abs(a)
        piece = p if mag == 1 else "%s*%s" % (mag, p)
        if not out:
            out = piece if a > 0 else "-" + piece
        else:
            out += (" + " if a > 0 else " - ") + piece
    const = Fraction(const)
    if const or not out:
        text = str(abs(const)) if out else str(const)
        if not out:
            return text
        out += (" + " if const > 0 else " - ") + text
    return out


@dataclass(frozen=True)
class Atom:
    """``lhs rel rhs`` where ``lhs`` is ``()``, ``(c,)`` or ``(c1, c2)`` (difference)."""

    lhs: tuple
    rel: str
    rhs: LinearTerm

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise ModelError("unknown relation %r" % (self.rel,))
        if len(self.lhs) > 2:
            raise ModelError("clock side must be 0, c or c1 - c2")

    @property
    def clocks(self):
        return self.lhs

    def lhs_value(self, mu):
        vals = []
        for c in self.lhs:
            if c not in mu:
                raise UnknownIdentifier(c, "clock")
            vals.append(Fraction(mu[c]))
        if not vals:
            return Fraction(0)
        if len(vals) == 1:
            return vals[0]
        return vals[0] - vals[1]

    def holds(self, mu, v):
        return compare(self.lhs_value(mu), self.rel, self.rhs.evaluate(v))

    def negated(self):
        """Atoms whose disjunction is the negation; ``=`` splits in two."""
        if self.rel == "=":
            return [Atom(self.lhs, "<", self.rhs), Atom(self.lhs, ">", self.rhs)]
        neg = {"<": ">=", "<=": ">", ">=": "<", ">": "<="}[self.rel]
        return [Atom(self.lhs, neg, self.rhs)]

    def rename(self, clock_map):
        return Atom(tuple(clock_map.get(c, c) for c in self.lhs), self.rel, self.rhs)

    def substitute_zero(self, zero_clocks):
        """Replace the clocks in ``zero_clocks`` by 0 (used by observer guards)."""
        lhs = self.lhs
        if len(lhs) == 1 and lhs[0] in zero_clocks:
            return Atom((), self.rel, self.rhs)
        if len(lhs) == 2:
            a, b = lhs
            if a in zero_clocks and b in zero_clocks:
                return Atom((), self.rel, self.rhs)
            if a in zero_clocks:
                # 0 - b rel rhs   <=>   b flip(rel) -rhs
                return Atom((b,), FLIP[self.rel], -self.rhs)
            if b in zero_clocks:
                return Atom((a,), self.rel, self.rhs)
        return self

    def __str__(self):
        if not self.lhs:
            left = "0"
        elif len(self.lhs) == 1:
            left = self.lhs[0]
        else:
            left = "%s - %s" % self.lhs
        return "%s %s %s" % (left, self.rel, self.rhs)


@dataclass(frozen=True)
class Guard:
    """Conjunction of atoms; the empty conjunction is true."""

    atoms: tuple = ()

    @classmethod
    def of(cls, *atoms):
        return cls(tuple(atoms))

    def is_true(self):
        return not self.atoms

    def __and__(self, other):
        return Guard(self.atoms + tuple(a for a in other.atoms if a not in self.atoms))

    def clocks(self):
        return {c for a in self.atoms for c in a.lhs}

    def params(self):
        return {p for a in self.atoms for p in a.rhs.params}

    def rename(self, clock_map):
        return Guard(tuple(a.rename(clock_map) for a in self.atoms))

    def __str__(self):
        return " & ".join(str(a) for a in self.atoms) if self.atoms else "true"


TRUE = Guard()


def eval_guard(g, mu, v):
    """Exact truth of a guard under clock valuation ``mu`` and parameters ``v``."""
    return all(a.holds(mu, v) for a in g.atoms)


@dataclass(frozen=True)
class Location:
    name: str
    labels: frozenset = frozenset()
    invariant: Guard = TRUE


@dataclass(frozen=True)
class Edge:
    source: int
    guard: Guard
    resets: frozenset
    target: int


@dataclass(frozen=True)
class Pta:
    """Locations and edges are referenced by integer position (stable ids)."""

    name: str
    props: frozenset
    locations: tuple
    initial: frozenset
    clocks: tuple
    params: tuple
    edges: tuple
    scale: int = 1
    parts: tuple = field(default=(), compare=False)

    def loc_index(self, name):
        for i, loc in enumerate(self.locations):
            if loc.name == name:
                return i
        raise UnknownIdentifier(name, "location")

    def out_edges(self, i):
        return [e for e in self.edges if e.source == i]

    def labels(self, i):
        return self.locations[i].labels

    def max_constant(self, v=None):
        """Largest absolute constant in guards/invariants after substituting ``v``."""
        m = Fraction(0)
        for g in [loc.invariant for loc in self.locations] + [e.guard for e in self.edges]:
            for a in g.atoms:
                x = a.rhs.evaluate(v or {}) if a.rhs.coeffs else a.rhs.const
                m = max(m, abs(x))
        return m


def make_pta(name, locations, initial, edges, clocks=(), params=(), props=None):
    """Convenience constructor taking names for initial locations and edge ends."""
    locs = tuple(locations)
    index = {loc.name: i for i, loc in enumerate(locs)}

    def idx(x):
        if isinstance(x, int):
            return x
        if x not in index:
            raise UnknownIdentifier(x, "location")
        return index[x]

    es = tuple(Edge(idx(s), g, frozenset(r), idx(t)) for s, g, r, t in edges)
    if props is None:
        props = frozenset().union(*[loc.labels for loc in locs]) if locs else frozenset()
    return Pta(name, frozenset(props), locs, frozenset(idx(i) for i in initial),
               tuple(clocks), tuple(params), es)


# ---------------------------------------------------------------------------
# valuation and validation


def _map_terms(A, fn):
    locs = tuple(replace(loc, invariant=Guard(tuple(Atom(a.lhs, a.rel, fn(a.rhs))
                                                    for a in loc.invariant.atoms)))
                 for loc in A.locations)
    edges = tuple(replace(e, guard=Guard(tuple(Atom(a.lhs, a.rel, fn(a.rhs))
                                               for a in e.guard.atoms)))
                  for e in A.edges)
    return locs, edges


def valuate_pta(A, v, rescale=False):
    """Substitute ``v`` for every parameter; optionally rescale to integer constants."""
    for p in A.params:
        if p not in v:
            raise UnknownIdentifier(p, "parameter")
    v = {p: Fraction(x) for p, x in v.items()}
    locs, edges = _map_terms(A, lambda t: LinearTerm.make({}, t.evaluate(v)))
    out = replace(A, locations=locs, edges=edges, params=())
    if not rescale:
        return out
    den = 1
    for g in [loc.invariant for loc in locs] + [e.guard for e in edges]:
        for a in g.atoms:
            d = a.rhs.const.denominator
            den = den * d // gcd(den, d)
    locs, edges = _map_terms(out, lambda t: t.scale(den))
    return replace(out, locations=locs, edges=edges, scale=A.scale * den)


@dataclass(frozen=True)
class Diagnostic:
    level: str
    message: str

    def __str__(self):
        return "%s: %s" % (self.level, self.message)


def validate_pta(A):
    """Every violation of the structural invariants, as a list of diagnostics."""
    out = []
    n = len(A.locations)
    clocks, params = set(A.clocks), set(A.params)
    if not A.initial:
        out.append(Diagnostic("error", "no initial location"))
    for i in A.initial:
        if not 0 <= i < n:
            out.append(Diagnostic("error", "initial location %r does not exist" % (i,)))

    def check_guard(g, where):
        for a in g.atoms:
            for c in a.lhs:
                if c not in clocks:
                    out.append(Diagnostic("error", "%s: undeclared clock %r" % (where, c)))
            for p in a.rhs.params:
                if p not in params:
                    out.append(Diagnostic("error", "%s: undeclared parameter %r" % (where, p)))

    for loc in A.locations:
        extra = set(loc.labels) - set(A.props)
        if extra:
            out.append(Diagnostic("error", "location %s: undeclared propositions %s"
                                  % (loc.name, sorted(extra))))
        check_guard(loc.invariant, "location %s" % loc.name)
    for k, e in enumerate(A.edges):
        where = "edge %d" % k
        for end in (e.source, e.target):
            if not (isinstance(end, int) and 0 <= end < n):
                out.append(Diagnostic("error", "%s: unknown location %r" % (where, end)))
        for c in e.resets:
            if c not in clocks:
                out.append(Diagnostic("error", "%s: undeclared clock %r in reset" % (where, c)))
        check_guard(e.guard, where)
        if e.source == e.target and e.guard.is_true() and not e.resets:
            out.append(Diagnostic("warning", "%s: self-loop without guard or reset" % where))
    return out


def strip_trivial_loops(A):
    """Drop self-loops with no guard and no reset (they do not change the semantics)."""
    edges = tuple(e for e in A.edges
                  if not (e.source == e.target and e.guard.is_true() and not e.resets))
    return replace(A, edges=edges)


def merge_equal_clocks(A):
    """Identify clocks that every edge resets together (all start at 0, so they agree).

    Returns ``(A', mapping)`` where mapping sends each removed clock to its representative.
    """
    sig = {c: [] for c in A.clocks}
    for k, e in enumerate(A.edges):
        for c in e.resets:
            sig[c].append(k)
    rep, mapping = {}, {}
    for c in A.clocks:
        key = tuple(sig[c])
        if key in rep:
            mapping[c] = rep[key]
        else:
            rep[key] = c
    if not mapping:
        return A, mapping
    full = {c: mapping.get(c, c) for c in A.clocks}

    def fix(g):
        atoms = []
        for a in g.rename(full).atoms:
            if len(a.lhs) == 2 and a.lhs[0] == a.lhs[1]:
                a = Atom((), a.rel, a.rhs)
            atoms.append(a)
        return Guard(tuple(dict.fromkeys(atoms)))

    locs = tuple(Location(l.name, l.labels, fix(l.invariant)) for l in A.locations)
    edges = tuple(Edge(e.source, fix(e.guard), frozenset(full[c] for c in e.resets), e.target)
                  for e in A.edges)
    clocks = tuple(c for c in A.clocks if c not in mapping)
    return replace(A, locations=locs, edges=edges, clocks=clocks), mapping


def is_integer_valued(A):
    for g in [loc.invariant for loc in A.locations] + [e.guard for e in A.edges]:
        for a in g.atoms:
            if a.rhs.const.denominator != 1:
                return False
    return True


# ---------------------------------------------------------------------------
# text format

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) | (?P<nl>\n) | (?P<comment>\#[^\n]*) |
    (?P<num>\d+(?:/\d+)?) | (?P<id>[A-Za-z_][A-Za-z0-9_']*) |
    (?P<op><=|>=|->|[<>=;,{}()*+\-&:/]) | (?P<bad>.)
""", re.X)


class _Tokens:
    def __init__(self, text):
        self.toks = []
        line, col0 = 1, 0
        for m in _TOKEN.finditer(text):
            kind = m.lastgroup
            if kind == "nl":
                line += 1
                col0 = m.end()
                continue
            if kind in ("ws", "comment"):
                continue
            if kind == "bad":
                raise ModelError("unexpected character %r" % m.group(), line, m.start() - col0 + 1)
            self.toks.append((kind, m.group(), line, m.start() - col0 + 1))
        self.i = 0

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else ("eof", "", self._end()[0], self._end()[1])

    def _end(self):
        if self.toks:
            return self.toks[-1][2], self.toks[-1][3] + len(self.toks[-1][1])
        return 1, 1

    def next(self):
        t = self.peek()
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ModelError(msg, tok[2], tok[3])

    def expect(self, value):
        t = self.next()
        if t[1] != value:
            raise self.error("expected %r, found %r" % (value, t[1] or "end of input"), t)
        return t

    def accept(self, value):
        if self.peek()[1] == value:
            self.i += 1
            return True
        return False

    def ident(self):
        t = self.next()
        if t[0] != "id":
            raise self.error("expected identifier, found %r" % (t[1] or "end of input"), t)
        return t[1]


def _parse_sum(tk, clocks, params):
    """A linear expression; returns (clock coeffs, param coeffs, const)."""
    cl, pa, const = {}, {}, Fraction(0)
    sign = 1
    if tk.accept("-"):
        sign = -1
    while True:
        tok = tk.peek()
        k = Fraction(1)
        name = None
        where = tok
        if tok[0] == "num":
            tk.next()
            k = Fraction(tok[1])
            if tk.accept("*"):
                name = tk.ident()
        elif tok[0] == "id":
            name = tk.next()[1]
            if tk.accept("*"):
                t2 = tk.next()
                if t2[0] != "num":
                    raise tk.error("expected number after '*'", t2)
                k = Fraction(t2[1])
        else:
            raise tk.error("expected a term, found %r" % (tok[1] or "end of input"))
        k *= sign
        if name is None:
            const += k
        elif name in clocks:
            cl[name] = cl.get(name, 0) + k
        elif name in params:
            pa[name] = pa.get(name, 0) + k
        else:
            raise UnknownIdentifier(name, line=where[2], col=where[3])
        if tk.accept("+"):
            sign = 1
        elif tk.accept("-"):
            sign = -1
        else:
            return cl, pa, const


def _make_atom(left, rel, right, tk):
    cl = dict(left[0])
    for c, a in right[0].items():
        cl[c] = cl.get(c, 0) - a
    cl = {c: a for c, a in cl.items() if a}
    # clock part rel param part:  cl  rel  (right params - left params) + const
    pa = dict(right[1])
    for p, a in left[1].items():
        pa[p] = pa.get(p, 0) - a
    const = right[2] - left[2]
    if any(a.denominator != 1 for a in pa.values()):
        raise tk.error("parameter coefficients must be integers")
    rhs = LinearTerm.make({p: int(a) for p, a in pa.items()}, const)
    items = sorted(cl.items(), key=lambda x: -x[1])
    if not items:
        return Atom((), rel, rhs)
    if len(items) == 1 and abs(items[0][1]) == 1:
        if items[0][1] == 1:
            return Atom((items[0][0],), rel, rhs)
        return Atom((items[0][0],), FLIP[rel], -rhs)
    if len(items) == 2 and items[0][1] == 1 and items[1][1] == -1:
        return Atom((items[0][0], items[1][0]), rel, rhs)
    raise tk.error("clock side must be a clock or a difference of two clocks")


def _parse_guard(tk, clocks, params):
    atoms = []
    while True:
        if tk.peek()[1] == "true":
            tk.next()
        else:
            left = _parse_sum(tk, clocks, params)
            rel = tk.next()
            if rel[1] not in RELATIONS:
                raise tk.error("expected a relation, found %r" % rel[1], rel)
            right = _parse_sum(tk, clocks, params)
            atoms.append(_make_atom(left, rel[1], right, tk))
            while tk.peek()[1] in RELATIONS:
                rel2 = tk.next()[1]
                third = _parse_sum(tk, clocks, params)
                atoms.append(_make_atom(right, rel2, third, tk))
                right = third
        if not tk.accept("&"):
            return Guard(tuple(atoms))


def _parse_idlist(tk, stop=";"):
    out = []
    if tk.peek()[1] == stop:
        return out
    while True:
        out.append(tk.ident())
        if not tk.accept(","):
            return out


def parse_pta(text):
    """Parse the ``pta ...`` text format."""
    tk = _Tokens(text)
    tk.expect("pta")
    name = tk.ident()
    tk.accept(";")
    clocks, params = [], []
    locs, initial, edges = [], [], []
    raw_edges = []
    while tk.peek()[0] != "eof":
        kw = tk.next()
        if kw[1] == "clocks":
            clocks += _parse_idlist(tk)
            tk.expect(";")
        elif kw[1] == "params":
            params += _parse_idlist(tk)
            tk.expect(";")
        elif kw[1] == "loc":
            lname = tk.ident()
            if any(l.name == lname for l in locs):
                raise tk.error("duplicate location %r" % lname, kw)
            is_init = tk.accept("initial")
            labels, inv = frozenset(), TRUE
            if tk.accept("labels"):
                tk.expect("{")
                labels = frozenset(_parse_idlist(tk, "}"))
                tk.expect("}")
            if tk.accept("inv"):
                inv = _parse_guard(tk, clocks, params)
            tk.expect(";")
            if is_init:
                initial.append(len(locs))
            locs.append(Location(lname, labels, inv))
        elif kw[1] == "edge":
            src_tok = tk.peek()
            src = tk.ident()
            tk.expect("->")
            dst = tk.ident()
            guard, resets = TRUE, frozenset()
            if tk.accept("when"):
                guard = _parse_guard(tk, clocks, params)
            if tk.accept("reset"):
                tk.expect("{")
                resets = frozenset(_parse_idlist(tk, "}"))
                tk.expect("}")
                for c in resets:
                    if c not in clocks:
                        raise tk.error("undeclared clock %r in reset" % c, src_tok)
            tk.expect(";")
            raw_edges.append((src, guard, resets, dst, src_tok))
        else:
            raise tk.error("unexpected %r" % (kw[1],), kw)
    index = {l.name: i for i, l in enumerate(locs)}
    for src, guard, resets, dst, tok in raw_edges:
        for end in (src, dst):
            if end not in index:
                raise ModelError("unknown location %r" % end, tok[2], tok[3])
        edges.append(Edge(index[src], guard, resets, index[dst]))
    props = frozenset().union(*[l.labels for l in locs]) if locs else frozenset()
    return Pta(name, props, tuple(locs), frozenset(initial), tuple(clocks),
               tuple(params), tuple(edges))


def load_pta(path):
    with open(path, encoding="utf-8") as fh:
        return parse_pta(fh.read())


def _safe(name):
    return re.sub(r"[^A-Za-z0-9_]", "_", name)


def format_pta(A):
    """Text form readable by :func:`parse_pta` (names are sanitised)."""
    lines = ["pta %s" % _safe(A.name)]
    if A.clocks:
        lines.append("clocks %s;" % ", ".join(A.clocks))
    if A.params:
        lines.append("params %s;" % ", ".join(A.params))
    names = [_safe(l.name) for l in A.locations]
    for i, loc in enumerate(A.locations):
        s = "loc %s" % names[i]
        if i in A.initial:
            s += " initial"
        if loc.labels:
            s += " labels {%s}" % ", ".join(sorted(loc.labels))
        if not loc.invariant.is_true():
            s += " inv %s" % loc.invariant
        lines.append(s + ";")
    for e in A.edges:
        s = "edge %s -> %s" % (names[e.source], names[e.target])
        if not e.guard.is_true():
            s += " when %s" % e.guard
        if e.resets:
            s += " reset {%s}" % ", ".join(sorted(e.resets))
        lines.append(s + ";")
    return "\n".join(lines) + "\n"


def to_dot(A):
    """Graphviz rendering."""
    out = ["digraph %s {" % _safe(A.name), "  rankdir=LR;"]
    for i, loc in enumerate(A.locations):
        label = loc.name
        if loc.labels:
            label += "\\n{%s}" % ", ".join(sorted(loc.labels))
        if not loc.invariant.is_true():
            label += "\\n%s" % loc.invariant
        shape = "doublecircle" if i in A.initial else "circle"
        out.append('  n%d [shape=%s, label="%s"];' % (i, shape, label))
    for e in A.edges:
        label = "" if e.guard.is_true() else str(e.guard)
        if e.resets:
            label += " / %s := 0" % ", ".join(sorted(e.resets))
        out.append('  n%d -> n%d [label="%s"];' % (e.source, e.target, label.strip()))
    out.append("}")
    return "\n".join(out) + "\n"
