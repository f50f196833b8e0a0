"""Built-in synthesis for the existential until and export to IMITATOR.

Symbolic states are pairs (location, polyhedron) over the clocks, the
parameters and one extra never-reset clock ``t_abs`` measuring the time since
the start.  The polyhedron of a state already contains every dwell instant
(it is closed under time elapse within the invariant), so witnesses reached
in the middle of a delay come for free.
"""

from dataclasses import dataclass, field
import logging
import os
import re
import time

from .model import DENSE, Atom, Guard
from .polyhedra import ConvexPoly, Lin, ParamSet, _orthant_rows, complement_poly

log = logging.getLogger(__name__)


class Unsupported(Exception):
    """The builtin backend cannot decide this operator; use the export path."""


class SynthTimeout(Exception):
    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


@dataclass
class SynthOptions:
    max_depth: int = None
    timeout: float = 300.0
    inclusion_check: bool = True
    time_domain: str = DENSE
    warn_deadlock: bool = True


@dataclass(frozen=True)
class SymbolicState:
    location: int
    poly: ConvexPoly
    bound_met: bool = False
    entry: ConvexPoly = field(default=None, compare=False)


# ---------------------------------------------------------------------------
# polyhedral helpers


def _side(atom):
    lhs = Lin()
    if len(atom.lhs) == 1:
        lhs = Lin.var(atom.lhs[0])
    elif len(atom.lhs) == 2:
        lhs = Lin.var(atom.lhs[0]) - Lin.var(atom.lhs[1])
    rhs = Lin({p: a for p, a in atom.rhs.coeffs}, atom.rhs.const)
    return lhs, rhs


_REL = {"<": "lt", "<=": "le", "=": "eq", ">=": "ge", ">": "gt"}


def atom_constraint(atom):
    lhs, rhs = _side(atom)
    return getattr(lhs, _REL[atom.rel])(rhs)


def guard_poly(g, variables):
    return ConvexPoly.of(variables, [atom_constraint(a) for a in g.atoms])


class Context:
    """Variable layout and cached guard polyhedra for one exploration."""

    def __init__(self, A, params=None, with_tabs=True):
        self.A = A
        params = tuple(params) if params is not None else tuple(A.params)
        for p in A.params:
            if p not in params:
                params += (p,)
        self.params = params
        tname = "t_abs"
        while tname in A.clocks or tname in params:
            tname = "_" + tname
        self.tabs = tname if with_tabs else None
        self.clocks = tuple(A.clocks) + ((tname,) if with_tabs else ())
        self.vars = self.clocks + params
        self._cache = {}
        n = len(self.vars)
        self.nonneg = [tuple(-1 if i == j else 0 for j in range(n)) for i in range(n)]

    def poly(self, g):
        p = self._cache.get(g)
        if p is None:
            p = guard_poly(g, self.vars)
            self._cache[g] = p
        return p

    def orthant(self):
        return ConvexPoly(self.vars, [(c, 0, False) for c in self.nonneg])

    def zero_clocks(self):
        return self.orthant().add([Lin.var(c).eq(0) for c in self.clocks])

    def elapse(self, Z):
        """Points reachable from Z by letting time pass (all clocks advance together)."""
        if Z.is_empty():
            return Z
        idx = [Z.vars.index(c) for c in self.clocks]
        ineqs = []
        for c, k, s in Z.ineqs:
            d = -sum(c[i] for i in idx)
            ineqs.append((c + (d,), k, s))
        eqs = []
        for c, k in Z.eqs:
            d = -sum(c[i] for i in idx)
            eqs.append((c + (d,), k))
        n = len(Z.vars)
        ineqs.append(((0,) * n + (-1,), 0, False))
        big = ConvexPoly(Z.vars + ("__delta",), ineqs, eqs)
        return big.project(Z.vars)

    def reset(self, Z, clocks):
        if not clocks:
            return Z
        Z = Z.eliminate(sorted(clocks))
        return Z.add([Lin.var(c).eq(0) for c in sorted(clocks)])

    def params_of(self, Z):
        return Z.project(self.params)


# ---------------------------------------------------------------------------
# bounds on the duration


def _bound_kind(bound):
    if bound is None:
        return None
    rel = bound[0]
    if rel in ("<", "<=", "="):
        return "upper"
    return "lower"


def _gamma_lin(gamma):
    return Lin.var(gamma) if isinstance(gamma, str) else Lin({}, gamma)


def _bound_constraint(ctx, bound):
    rel, gamma = bound
    return getattr(Lin.var(ctx.tabs), _REL[rel])(_gamma_lin(gamma))


def _upper_cap(ctx, bound):
    rel, gamma = bound
    rel = "<=" if rel == "=" else rel
    return getattr(Lin.var(ctx.tabs), _REL[rel])(_gamma_lin(gamma))


# ---------------------------------------------------------------------------
# exploration


def initial_states(A, ctx, bound=None):
    out = []
    kind = _bound_kind(bound)
    for l in sorted(A.initial):
        inv = ctx.poly(A.locations[l].invariant)
        entry = ctx.zero_clocks().meet(inv)
        if entry.is_empty():
            continue
        Z = ctx.elapse(entry).meet(inv)
        if kind == "upper":
            Z = Z.add([_upper_cap(ctx, bound)])
        out.append(SymbolicState(l, Z, False, entry))
    return out


def symbolic_successors(s, A, ctx=None, bound=None):
    """Discrete step along every edge followed by time elapse in the target."""
    ctx = ctx or Context(A)
    kind = _bound_kind(bound)
    out = []
    for e in A.edges:
        if e.source != s.location:
            continue
        Z = s.poly.meet(ctx.poly(e.guard))
        if Z.is_empty():
            continue
        Z = ctx.reset(Z, e.resets)
        inv = ctx.poly(A.locations[e.target].invariant)
        entry = Z.meet(inv)
        if entry.is_empty():
            continue
        Z = ctx.elapse(entry).meet(inv)
        if kind == "upper":
            Z = Z.add([_upper_cap(ctx, bound)])
            if Z.is_empty():
                continue
        out.append(SymbolicState(e.target, Z, s.bound_met, entry))
    return out


class _Coverage:
    """Tracks the part of the parameter orthant not yet covered by goal polyhedra.

    Once nothing is left the exploration can stop: more goals add no valuation.
    Tracking is dropped when the remainder splits into too many pieces.
    """

    LIMIT = 64

    def __init__(self, params):
        self.rest = [ConvexPoly(tuple(params), _orthant_rows(len(params)))]
        self.seen = set()

    def add(self, poly):
        if not self.rest or poly in self.seen:
            return
        self.seen.add(poly)
        if all(a.meet(poly).is_empty() for a in self.rest):
            return
        pieces = complement_poly(poly)
        nxt = []
        for a in self.rest:
            if a.meet(poly).is_empty():
                nxt.append(a)
                continue
            for b in pieces:
                m = a.meet(b)
                if not m.is_empty():
                    nxt.append(m)
        self.rest = nxt if len(nxt) <= self.LIMIT else None

    def full(self):
        return self.rest == []


def eu_synth(A, phi1sat, phi2sat, bound=None, opts=None, params=None):
    """Parameter valuations for which some run satisfies phi1 until phi2 (with the bound).

    ``phi1sat``/``phi2sat`` are the sets of location ids where the operands hold.
    The result carries ``partial=True`` when exploration was cut short by the
    depth limit or the timeout; it is then an under-approximation.
    """
    opts = opts or SynthOptions()
    phi1sat, phi2sat = frozenset(phi1sat), frozenset(phi2sat)
    kind = _bound_kind(bound)
    ctx = Context(A, params, with_tabs=kind is not None)
    start = time.monotonic()
    partial = False
    goals = []
    cover = _Coverage(ctx.params)

    def collect(s):
        if s.location not in phi2sat:
            return
        Z = s.poly if s.location in phi1sat else s.entry
        if kind is not None and not s.bound_met:
            Z = Z.add([_bound_constraint(ctx, bound)])
        if not Z.is_empty():
            g = ctx.params_of(Z)
            goals.append(g)
            cover.add(g)

    def split(s):
        """For lower bounds: forget t_abs on the part where the bound already holds."""
        if kind != "lower" or s.bound_met:
            return [s]
        met = s.poly.add([_bound_constraint(ctx, bound)])
        if met.is_empty():
            return [s]
        rel, gamma = bound
        neg = {">": "<=", ">=": "<"}[rel]
        unmet = s.poly.add([getattr(Lin.var(ctx.tabs), _REL[neg])(_gamma_lin(gamma))])
        out = [SymbolicState(s.location, met.eliminate(ctx.tabs), True, s.entry)]
        if not unmet.is_empty():
            out.append(SymbolicState(s.location, unmet, False, s.entry))
        return out

    visited = {}

    def seen(s):
        key = (s.location, s.bound_met)
        lst = visited.setdefault(key, [])
        if opts.inclusion_check:
            for Z in lst:
                if Z.includes(s.poly):
                    return True
        elif s.poly in lst:
            return True
        lst.append(s.poly)
        return False

    frontier = []
    for s in initial_states(A, ctx, bound):
        collect(s)
        if s.location in phi1sat:
            for t in split(s):
                if not seen(t):
                    frontier.append(t)
    depth = 0
    deadlocks = 0
    while frontier:
        if cover.full():
            log.info("every parameter valuation is covered; stopping early")
            break
        if opts.max_depth is not None and depth >= opts.max_depth:
            partial = True
            break
        depth += 1
        nxt = []
        for s in frontier:
            if opts.timeout is not None and time.monotonic() - start > opts.timeout:
                partial = True
                nxt = []
                break
            succ = symbolic_successors(s, A, ctx, bound)
            if not succ and not A.locations[s.location].invariant.is_true():
                # time is bounded here and nothing can fire
                deadlocks += 1
            for t in succ:
                collect(t)
                if t.location not in phi1sat:
                    continue
                for u in split(t):
                    if not seen(u):
                        nxt.append(u)
        if partial:
            break
        frontier = nxt
    if deadlocks and opts.warn_deadlock:
        log.warning("%d explored symbolic states may be deadlocked", deadlocks)
    return ParamSet(ctx.params, goals, partial=partial)


def reachable_states(A, params=None, max_states=10000):
    """Plain forward exploration (used by tests and smoke checks).

    No absolute-time clock is tracked, otherwise no state would ever repeat.
    Returns ``(states, ctx)``.
    """
    ctx = Context(A, params, with_tabs=False)
    out = []
    frontier = initial_states(A, ctx)
    visited = {}
    while frontier and len(out) < max_states:
        s = frontier.pop(0)
        lst = visited.setdefault(s.location, [])
        if any(Z.includes(s.poly) for Z in lst):
            continue
        lst.append(s.poly)
        out.append(s)
        frontier.extend(symbolic_successors(s, A, ctx))
    return out, ctx


# ---------------------------------------------------------------------------
# IMITATOR export

_IDENT = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
_IMI_KEYWORDS = {
    "and", "or", "not", "True", "False", "var", "clock", "parameter", "discrete", "constant",
    "automaton", "actions", "loc", "invariant", "when", "do", "goto", "sync", "end", "init",
    "urgent", "accepting", "continuous", "property", "synth", "if", "then", "else",
    "bool", "int", "rat", "while", "stop", "wait", "in", "loc", "step", "projectresult",
}


class _Names:
    def __init__(self):
        self.map = {}
        self.used = set()

    def get(self, name, prefix):
        if name in self.map:
            return self.map[name]
        base = name if _IDENT.match(name) and name not in _IMI_KEYWORDS else \
            prefix + re.sub(r"[^A-Za-z0-9_]", "_", name).strip("_")
        cand, k = base, 1
        while cand in self.used or cand in _IMI_KEYWORDS:
            k += 1
            cand = "%s_%d" % (base, k)
        self.used.add(cand)
        self.map[name] = cand
        return cand


def _imi_term(t, names):
    parts = []
    for p, a in t.coeffs:
        n = names.get(p, "p_")
        parts.append(n if a == 1 else ("-%s" % n if a == -1 else "%d * %s" % (a, n)))
    const = t.const
    if const or not parts:
        c = str(abs(const)) if parts else str(const)
        if parts:
            parts.append(("- " if const < 0 else "+ ") + c)
        else:
            parts.append(c)
    out = parts[0]
    for piece in parts[1:]:
        if piece.startswith("- ") or piece.startswith("+ "):
            out += " " + piece
        elif piece.startswith("-"):
            out += " - " + piece[1:]
        else:
            out += " + " + piece
    return out


def _imi_atom(a, names):
    if not a.lhs:
        left = "0"
    elif len(a.lhs) == 1:
        left = names.get(a.lhs[0], "x_")
    else:
        left = "%s - %s" % (names.get(a.lhs[0], "x_"), names.get(a.lhs[1], "x_"))
    return "%s %s %s" % (left, a.rel, _imi_term(a.rhs, names))


def _imi_guard(g, names):
    if g.is_true():
        return "True"
    return " & ".join(_imi_atom(a, names) for a in g.atoms)


def export_imitator(artifacts, outdir, name=None):
    """Write ``<name>.imi`` and ``<name>.imiprop`` for one temporal sub-problem.

    ``artifacts`` is a :class:`hyptctl.reduce.ReductionArtifacts`.  Returns the
    two paths.
    """
    A = artifacts.product
    name = name or artifacts.name
    os.makedirs(outdir, exist_ok=True)
    model_text, prop_text = imitator_texts(A, artifacts.phi1sat, artifacts.phi2sat,
                                           artifacts.bound, artifacts.quant,
                                           params=artifacts.params,
                                           legend=artifacts.legend,
                                           formula_text=artifacts.formula_text)
    p1 = os.path.join(outdir, name + ".imi")
    p2 = os.path.join(outdir, name + ".imiprop")
    with open(p1, "w", encoding="utf-8") as fh:
        fh.write(model_text)
    with open(p2, "w", encoding="utf-8") as fh:
        fh.write(prop_text)
    return p1, p2


def imitator_texts(A, phi1sat, phi2sat, bound=None, quant="E", params=None, legend=(),
                   formula_text=None):
    """The model and property texts (see :func:`export_imitator`)."""
    names = _Names()
    aut = names.get("pta", "a_")
    params = list(params or A.params)
    for p in A.params:
        if p not in params:
            params.append(p)
    clocks = [names.get(c, "x_") for c in A.clocks]
    pnames = [names.get(p, "p_") for p in params]
    locname = {}
    for i, loc in enumerate(A.locations):
        locname[i] = names.get("l%d" % i, "l_")
    phi1sat, phi2sat = set(phi1sat), set(phi2sat)
    tabs = None
    extra_locs = []      # (name, urgent, [(guard_text, resets, target)])
    transitions = {i: [] for i in range(len(A.locations))}
    for e in A.edges:
        transitions[e.source].append((_imi_guard(e.guard, names),
                                      [names.get(c, "x_") for c in sorted(e.resets)],
                                      locname[e.target]))
    target_pred = None
    prop_phi1 = set(phi1sat)
    init_name = None
    inits = sorted(A.initial)
    need_init = len(inits) != 1
    if bound is not None:
        tabs = names.get("t_abs", "x_")
        clocks.append(tabs)
        goal = names.get("lgoal", "l_")
        rel, gamma = bound
        g_rhs = names.get(gamma, "p_") if isinstance(gamma, str) else str(gamma)
        bclause = "%s %s %s" % (tabs, rel, g_rhs)
        for i, loc in enumerate(A.locations):
            if i in phi2sat and i in phi1sat:
                transitions[i].append((bclause, [], goal))
        for e in A.edges:
            if e.target in phi2sat and e.target not in phi1sat and e.source in phi1sat:
                inv = Guard(tuple(a.substitute_zero(e.resets)
                                  for a in A.locations[e.target].invariant.atoms))
                g = e.guard & inv
                gt = _imi_guard(g, names)
                gt = bclause if gt == "True" else gt + " & " + bclause
                transitions[e.source].append((gt, [names.get(c, "x_") for c in sorted(e.resets)],
                                              goal))
        extra_locs.append((goal, False, []))
        if any(i in phi2sat for i in inits):
            need_init = True
        target_pred = "loc[%s] = %s" % (aut, goal)
    if need_init:
        init_name = names.get("linit", "l_")
        outs = []
        for i in inits:
            inv = Guard(tuple(dict.fromkeys(a.substitute_zero(frozenset(A.clocks))
                                            for a in A.locations[i].invariant.atoms)))
            outs.append((_imi_guard(inv, names), [], locname[i]))
            if bound is not None and i in phi2sat:
                g = _imi_guard(inv, names)
                bz = "0 %s %s" % (bound[0], names.get(bound[1], "p_") if isinstance(bound[1], str)
                                  else bound[1])
                outs.append(((bz if g == "True" else g + " & " + bz), [],
                             names.get("lgoal", "l_")))
        extra_locs.insert(0, (init_name, True, outs))
    if target_pred is None:
        target_pred = _loc_pred(aut, [locname[i] for i in sorted(phi2sat)])
    phi1_names = [locname[i] for i in sorted(prop_phi1)]
    if init_name:
        phi1_names.append(init_name)

    lines = ["(" + "*" * 60, " * Generated by hyptctl from product automaton %s" % A.name]
    if formula_text:
        lines.append(" * formula: %s" % _comment_safe(formula_text))
    for fresh, text in legend:
        lines.append(" * %s := %s" % (fresh, _comment_safe(text)))
    lines.append(" " + "*" * 60 + ")")
    lines.append("")
    lines.append("(* locations of the product:")
    for i, loc in enumerate(A.locations):
        lines.append("   %s = %s" % (locname[i], _comment_safe(loc.name)))
    lines.append("*)")
    lines.append("")
    lines.append("var")
    if clocks:
        lines.append("\t%s\n\t\t: clock;" % ", ".join(clocks))
    if pnames:
        lines.append("\t%s\n\t\t: parameter;" % ", ".join(pnames))
    lines.append("")
    lines.append("automaton %s" % aut)
    lines.append("actions: ;")
    lines.append("")
    for lname, urgent, outs in extra_locs[:1] if init_name else []:
        lines.append("urgent loc %s: invariant True" % lname)
        for g, r, t in outs:
            lines.append(_imi_transition(g, r, t))
        lines.append("")
    for i, loc in enumerate(A.locations):
        lines.append("loc %s: invariant %s" % (locname[i], _imi_guard(loc.invariant, names)))
        for g, r, t in transitions[i]:
            lines.append(_imi_transition(g, r, t))
        lines.append("")
    for lname, urgent, outs in extra_locs[1:] if init_name else extra_locs:
        lines.append("loc %s: invariant True" % lname)
        lines.append("")
    lines.append("end")
    lines.append("")
    lines.append("init := {")
    lines.append("\tdiscrete =")
    first = init_name or (locname[inits[0]] if inits else None)
    if first is not None:
        lines.append("\t\tloc[%s] := %s," % (aut, first))
    lines.append("\t;")
    lines.append("\tcontinuous =")
    for c in clocks:
        lines.append("\t\t& %s = 0" % c)
    for p in pnames:
        lines.append("\t\t& %s >= 0" % p)
    lines.append("\t;")
    lines.append("}")
    lines.append("")
    lines.append("end")
    model = "\n".join(lines) + "\n"

    if quant == "A":
        op = "AU"
        notice = "(* universal until: not decidable by the builtin backend *)\n"
    else:
        op = "EU"
        notice = ""
    if not phi1_names or len(phi1_names) == len(A.locations) + (1 if init_name else 0):
        phi1 = "True"
    else:
        phi1 = _loc_pred(aut, phi1_names)
    if op == "EU" and phi1 == "True":
        prop = "property := #synth EF(%s);\n" % target_pred
    elif op == "AU" and phi1 == "True":
        prop = "property := #synth AF(%s);\n" % target_pred
    else:
        prop = "property := #synth %s(%s, %s);\n" % (op, phi1, target_pred)
    return model, notice + prop


def _comment_safe(text):
    return text.replace("(*", "( *").replace("*)", "* )")


def _loc_pred(aut, locs):
    if not locs:
        return "False"
    return " or ".join("loc[%s] = %s" % (aut, l) for l in locs)


def _imi_transition(g, resets, target):
    s = "\twhen %s" % g
    if resets:
        s += " do {%s}" % ", ".join("%s := 0" % c for c in resets)
    return s + " goto %s;" % target
