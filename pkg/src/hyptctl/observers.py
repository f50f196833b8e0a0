"""Observer automata for LAST and COUNT predicates.

Each extended predicate is compiled into a small PTA whose location labels
record, besides the monitored propositions, a fresh proposition that holds
exactly when the predicate does.  The product of the observers with the
system then lets the predicate be replaced by that fresh proposition.
"""

from itertools import combinations, product
import logging
import warnings

from .compose import sync_product_many, unit_pta
from .formula import (EXT, And, CountGe, CountMod, Exists, FalseF, Forall, Iff, Implies,
                      Last, Not, Or, ParamCmp, Prop, Temporal, TrueF, Xor, to_text)
from .model import Atom, Edge, Guard, Location, Pta, compare
from .polyhedra import ConvexPoly, Lin

log = logging.getLogger(__name__)


def _subsets(items):
    items = list(items)
    for r in range(len(items) + 1):
        for c in combinations(items, r):
            yield frozenset(c)


def _set_name(pr, order):
    return "{" + ",".join(s for s in order if s in pr) + "}"


def param_atom_satisfiable(atom):
    """Is a clock-free atom ``0 rel lt`` satisfiable for some non-negative parameters?"""
    params = atom.rhs.params
    expr = Lin({p: a for p, a in atom.rhs.coeffs}, atom.rhs.const)
    zero = Lin()
    con = {"<": zero.lt, "<=": zero.le, "=": zero.eq, ">=": zero.ge, ">": zero.gt}[atom.rel](expr)
    cons = [con] + [Lin.var(p).ge(0) for p in params]
    return not ConvexPoly.of(params, cons).is_empty()


def observer_last(s1, s2, rel, lt, name="__ext0"):
    """Observer for LAST(s1) - LAST(s2) rel lt.

    Locations are (pr, b) with pr a subset of {s1, s2, phi} and b in {T, F};
    the initial ones are the (pr, F).  Clock ``<name>_c1`` measures the time
    since s1 last rose, ``<name>_c2`` the same for s2.
    """
    phi = name
    c1, c2 = name + "_c1", name + "_c2"
    if s1 == s2:
        warnings.warn("LAST(%s) - LAST(%s): both sides coincide; one clock is shared" % (s1, s2))
        c2 = c1
        sig = (s1,)
    else:
        sig = (s1, s2)
    clock_of = {s1: c1, s2: c2}
    clocks = tuple(dict.fromkeys((c1, c2)))
    order = sig + (phi,)
    base = Atom((c1, c2), rel, lt)
    zero_test = Atom((), rel, lt)

    locs = []
    index = {}   # (pr, b) -> list of location ids (an "=" negation splits in two)
    initial = []
    for b in (True, False):
        for pr in _subsets(order):
            label = "(%s,%s)" % (_set_name(pr, order), "T" if b else "F")
            if b:
                index[(pr, b)] = [len(locs)]
                locs.append(Location(label, pr))
                continue
            invs = [zero_test] if phi in pr else zero_test.negated()
            ids = []
            for k, inv in enumerate(invs):
                if not param_atom_satisfiable(inv):
                    log.info("observer %s: dropping initial %s with unsatisfiable invariant %s",
                             name, label, inv)
                    continue
                suffix = "" if len(invs) == 1 else "#%d" % (k + 1)
                ids.append(len(locs))
                initial.append(len(locs))
                locs.append(Location(label + suffix, pr, Guard.of(inv)))
            index[(pr, b)] = ids

    edges = []
    sigset = frozenset(sig)
    for (pr, b), srcs in index.items():
        cur = pr & sigset
        for src in srcs:
            # no rise: some monitored propositions fall, the verdict is kept
            for pr2 in _subsets(order):
                if pr2 < pr and ((phi in pr) == (phi in pr2)):
                    for t in index[(pr2, True)]:
                        edges.append(Edge(src, Guard(), frozenset(), t))
            # a rise: the verdict is re-evaluated
            for nxt in _subsets(sig):
                rise = nxt - cur
                if not rise:
                    continue
                zeroed = frozenset(clock_of[s] for s in rise)
                g = base.substitute_zero(zeroed)
                if g.lhs or param_atom_satisfiable(g):
                    for t in index[(nxt | {phi}, True)]:
                        edges.append(Edge(src, Guard.of(g), zeroed, t))
                for ng in g.negated():
                    if not ng.lhs and not param_atom_satisfiable(ng):
                        continue
                    for t in index[(nxt, True)]:
                        edges.append(Edge(src, Guard.of(ng), zeroed, t))
    return Pta("obs_" + name, frozenset(order), tuple(locs), frozenset(initial), clocks,
               tuple(lt.params), tuple(edges))


def _count_observer(props, levels, step, holds, name):
    phi = name
    props = tuple(props)
    order = props + (phi,)
    states = [(pr, eta) for pr in _subsets(props)
              for eta in product(range(levels), repeat=len(props))]
    index = {s: i for i, s in enumerate(states)}
    locs = []
    for pr, eta in states:
        lab = set(pr)
        if holds(eta):
            lab.add(phi)
        locs.append(Location("(%s,%s)" % (_set_name(pr, props), ",".join(map(str, eta))),
                             frozenset(lab)))
    edges = []
    for pr, eta in states:
        for pr2 in _subsets(props):
            rise = pr2 - pr
            eta2 = tuple(step(x) if s in rise else x for s, x in zip(props, eta))
            edges.append(Edge(index[(pr, eta)], Guard(), frozenset(), index[(pr2, eta2)]))
    initial = frozenset(index[(pr, (0,) * len(props))] for pr in _subsets(props))
    return Pta("obs_" + name, frozenset(order), tuple(locs), initial, (), (), tuple(edges))


def _merge_terms(terms):
    out = {}
    for t in terms:
        s, a = t[0], t[-1]
        out[s] = out.get(s, 0) + a
    return out


def observer_count_ge(terms, rel, d, name="__ext0"):
    """Observer for sum(a * COUNT(s)) rel d with natural coefficients.

    ``terms`` is a sequence of ``(prop, coeff)`` (a middle path field is ignored).
    Counters saturate at d + 1.
    """
    coeffs = _merge_terms(terms)
    if any(a < 0 for a in coeffs.values()):
        raise ValueError("coefficients must be non-negative")
    props = tuple(sorted(coeffs))
    alpha = [coeffs[s] for s in props]

    def step(x):
        return x + 1 if x < d else d + 1

    def holds(eta):
        return compare(sum(a * x for a, x in zip(alpha, eta)), rel, d)

    return _count_observer(props, d + 2, step, holds, name)


def observer_count_mod(terms, n, rel, d, name="__ext0"):
    """Observer for (sum(a * COUNT(s)) mod n) rel d; counters wrap at n."""
    if n < 1:
        raise ValueError("modulus must be at least 1")
    coeffs = _merge_terms(terms)
    props = tuple(sorted(coeffs))
    alpha = [coeffs[s] for s in props]

    def step(x):
        return x + 1 if x < n - 1 else 0

    def holds(eta):
        return compare(sum(a * x for a, x in zip(alpha, eta)) % n, rel, d)

    return _count_observer(props, n, step, holds, name)


def observer_for(pred, name):
    if isinstance(pred, Last):
        return observer_last(pred.s1, pred.s2, pred.rel, pred.lt, name)
    if isinstance(pred, CountGe):
        return observer_count_ge(pred.terms, pred.rel, pred.d, name)
    if isinstance(pred, CountMod):
        return observer_count_mod(pred.terms, pred.n, pred.rel, pred.d, name)
    raise TypeError("not an extended predicate: %r" % (pred,))


def monitored_props(pred):
    if isinstance(pred, Last):
        return frozenset((pred.s1, pred.s2))
    return frozenset(t[0] for t in pred.terms)


def missing_moves(O, monitored):
    """(location, next monitored set) pairs with no edge: empty for a complete observer."""
    out = []
    monitored = frozenset(monitored)
    for i, loc in enumerate(O.locations):
        cur = loc.labels & monitored
        reach = {O.locations[e.target].labels & monitored for e in O.edges if e.source == i}
        for nxt in _subsets(sorted(monitored)):
            if nxt != cur and nxt not in reach:
                out.append((loc.name, nxt))
    return out


def ext_names(psi, prefix="__ext"):
    """Fresh proposition for each distinct extended predicate (first-occurrence order)."""
    from .formula import ext_predicates
    names = {}
    for k, pred in enumerate(ext_predicates(psi)):
        names[pred] = "%s%d" % (prefix, k)
    return names


def rmext(f, names, path=None):
    """Replace every extended predicate by its fresh proposition."""
    if isinstance(f, EXT):
        pi = path or _pred_path(f)
        return Prop(names[f], pi)
    if isinstance(f, (TrueF, FalseF, Prop, ParamCmp)):
        return f
    if isinstance(f, Not):
        return Not(rmext(f.arg, names, path))
    if isinstance(f, (Or, And, Implies, Iff, Xor)):
        return type(f)(rmext(f.left, names, path), rmext(f.right, names, path))
    if isinstance(f, Temporal):
        pi = f.paths[0] if len(f.paths) == 1 else path
        return Temporal(f.quant, f.paths, f.kind, f.bound,
                        None if f.lhs is None else rmext(f.lhs, names, pi),
                        rmext(f.rhs, names, pi))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.param, rmext(f.body, names, path))
    raise TypeError("not a formula: %r" % (f,))


def _pred_path(p):
    if isinstance(p, Last):
        return p.pi1
    return p.terms[0][1]


def build_observer_product(psi):
    """O(psi) and rmext(psi).

    Returns ``(observer_pta, stripped_formula, legend)`` where the legend lists
    ``(fresh_prop, predicate_text)`` pairs.  Without extended predicates the
    observer is the one-location unit automaton.
    """
    names = ext_names(psi)
    legend = []
    observers = []
    for pred, name in names.items():
        paths = {_pred_path(pred)} | ({pred.pi2} if isinstance(pred, Last)
                                      else {t[1] for t in pred.terms})
        if len(paths) != 1:
            raise ValueError("observer predicates must use a single path variable: %s"
                             % to_text(pred))
        O = observer_for(pred, name)
        assert all(name not in o.props for o in observers)
        observers.append(O)
        legend.append((name, to_text(pred)))
    if not observers:
        return unit_pta("obs"), psi, legend
    return sync_product_many(observers, prune=True), rmext(psi, names), legend
