"""Parallel composition, synchronized product and n-fold self-composition."""

from dataclasses import dataclass
from itertools import product
import warnings

from .model import Edge, Guard, Location, ModelError, Pta, strip_trivial_loops


class CompositionError(ModelError):
    pass


def loc_name(names):
    return "(" + "|".join(names) + ")"


def _params(*ptas):
    out = []
    for A in ptas:
        for p in A.params:
            if p not in out:
                out.append(p)
    return tuple(out)


def _check_clocks(ptas):
    seen = {}
    for k, A in enumerate(ptas):
        for c in A.clocks:
            if c in seen:
                raise CompositionError("clock %r occurs in components %d and %d"
                                       % (c, seen[c], k))
            seen[c] = k


def parallel_many(ptas, name=None):
    """Unsynchronised composition: any nonempty set of components moves at once."""
    ptas = list(ptas)
    _check_clocks(ptas)
    seen = {}
    for k, A in enumerate(ptas):
        for s in A.props:
            if s in seen:
                raise CompositionError("proposition %r occurs in components %d and %d"
                                       % (s, seen[s], k))
            seen[s] = k
    sizes = [len(A.locations) for A in ptas]
    tuples = list(product(*[range(n) for n in sizes]))
    index = {t: i for i, t in enumerate(tuples)}
    locs = []
    for t in tuples:
        parts = [A.locations[i] for A, i in zip(ptas, t)]
        labels = frozenset().union(*[l.labels for l in parts])
        inv = Guard()
        for l in parts:
            inv = inv & l.invariant
        locs.append(Location(loc_name([l.name for l in parts]), labels, inv))
    out_edges = [{} for _ in ptas]
    for k, A in enumerate(ptas):
        for e in A.edges:
            out_edges[k].setdefault(e.source, []).append(e)
    edges = []
    m = len(ptas)
    subsets = [s for s in product((False, True), repeat=m) if any(s)]
    subsets.sort(key=lambda s: (sum(s), [not x for x in s]))
    for t in tuples:
        for mask in subsets:
            choices = []
            for k in range(m):
                if mask[k]:
                    choices.append(out_edges[k].get(t[k], []))
                else:
                    choices.append([None])
            for combo in product(*choices):
                guard = Guard()
                resets = frozenset()
                target = list(t)
                for k, e in enumerate(combo):
                    if e is None:
                        continue
                    guard = guard & e.guard
                    resets |= e.resets
                    target[k] = e.target
                edges.append(Edge(index[t], guard, resets, index[tuple(target)]))
    initial = frozenset(index[t] for t in product(*[sorted(A.initial) for A in ptas]))
    props = frozenset().union(*[A.props for A in ptas])
    return Pta(name or "||".join(A.name for A in ptas), props, tuple(locs), initial,
               tuple(c for A in ptas for c in A.clocks), _params(*ptas), tuple(edges),
               parts=tuple(tuples))


def parallel(A1, A2):
    """A1 || A2 with left-only, right-only and joint edges."""
    return parallel_many([A1, A2], name="%s||%s" % (A1.name, A2.name))


def sync_product(A1, A2, prune=False):
    """A1 x A2: moves must keep the shared propositions consistent.

    With ``prune`` only syntactically reachable locations are built, identical
    edges are merged and self-loops without guard or reset are removed.
    """
    _check_clocks([A1, A2])
    s1, s2 = A1.props, A2.props
    key1 = [l.labels & s2 for l in A1.locations]
    key2 = [l.labels & s1 for l in A2.locations]
    out1, out2 = {}, {}
    for e in A1.edges:
        out1.setdefault(e.source, []).append(e)
    for e in A2.edges:
        out2.setdefault(e.source, []).append(e)
    init = [(i, j) for i in sorted(A1.initial) for j in sorted(A2.initial) if key1[i] == key2[j]]

    def succ(i, j):
        for e1 in out1.get(i, ()):
            if key1[e1.target] == key2[j]:
                yield e1.guard, e1.resets, (e1.target, j)
        for e2 in out2.get(j, ()):
            if key1[i] == key2[e2.target]:
                yield e2.guard, e2.resets, (i, e2.target)
        for e1 in out1.get(i, ()):
            for e2 in out2.get(j, ()):
                if key1[e1.target] == key2[e2.target]:
                    yield e1.guard & e2.guard, e1.resets | e2.resets, (e1.target, e2.target)

    if prune:
        order = list(init)
        seen = set(order)
        k = 0
        while k < len(order):
            i, j = order[k]
            k += 1
            for _, _, t in succ(i, j):
                if t not in seen:
                    seen.add(t)
                    order.append(t)
        pairs = order
    else:
        pairs = [(i, j) for i in range(len(A1.locations)) for j in range(len(A2.locations))]
    index = {p: n for n, p in enumerate(pairs)}
    locs = []
    for i, j in pairs:
        l1, l2 = A1.locations[i], A2.locations[j]
        locs.append(Location(loc_name([l1.name, l2.name]), l1.labels | l2.labels,
                             l1.invariant & l2.invariant))
    edges = []
    seen_edges = set()
    for p in pairs:
        for g, r, t in succ(*p):
            e = Edge(index[p], g, frozenset(r), index[t])
            if prune:
                if e.source == e.target and g.is_true() and not r:
                    continue
                if e in seen_edges:
                    continue
                seen_edges.add(e)
            edges.append(e)
    return Pta("%s*%s" % (A1.name, A2.name), s1 | s2, tuple(locs),
               frozenset(index[p] for p in init), A1.clocks + A2.clocks,
               _params(A1, A2), tuple(edges), parts=tuple(pairs))


def sync_product_many(ptas, prune=False):
    """Left fold of :func:`sync_product`."""
    ptas = list(ptas)
    acc = ptas[0]
    for B in ptas[1:]:
        acc = sync_product(acc, B, prune=prune)
    return acc


def unit_pta(name="unit"):
    """One location, no clocks, no edges: the neutral element of both products."""
    return Pta(name, frozenset(), (Location("u"),), frozenset({0}), (), (), ())


@dataclass(frozen=True)
class RenamingScheme:
    index: int
    props: tuple  # ((original, renamed), ...)
    clocks: tuple

    def prop(self, s):
        return dict(self.props)[s]

    def clock(self, c):
        return dict(self.clocks)[c]

    def inverse_prop(self, s):
        return {b: a for a, b in self.props}[s]

    def inverse_clock(self, c):
        return {b: a for a, b in self.clocks}[c]


def indexed(name, i):
    return "%s_%d" % (name, i)


def rename_copy(A, i):
    """The i-th copy of A: propositions and clocks get the suffix ``_i``."""
    pm = {s: indexed(s, i) for s in sorted(A.props)}
    cm = {c: indexed(c, i) for c in A.clocks}
    clash = set(cm.values()) & set(A.params)
    if clash:
        raise CompositionError("renamed clock collides with parameter %s" % sorted(clash))
    locs = tuple(Location(l.name, frozenset(pm[s] for s in l.labels), l.invariant.rename(cm))
                 for l in A.locations)
    edges = tuple(Edge(e.source, e.guard.rename(cm), frozenset(cm[c] for c in e.resets),
                       e.target) for e in A.edges)
    B = Pta("%s_%d" % (A.name, i), frozenset(pm.values()), locs, A.initial,
            tuple(cm[c] for c in A.clocks), A.params, edges)
    return B, RenamingScheme(i, tuple(sorted(pm.items())), tuple(cm.items()))


def self_compose(A, n):
    """A^n with copies renamed by index; trivial self-loops are removed afterwards."""
    if n < 1:
        raise CompositionError("n must be at least 1")
    copies, schemes = [], []
    for i in range(1, n + 1):
        B, r = rename_copy(A, i)
        copies.append(B)
        schemes.append(r)
    if n == 1:
        C = copies[0]
        C = Pta(C.name, C.props, tuple(Location(loc_name([l.name]), l.labels, l.invariant)
                                       for l in C.locations),
                C.initial, C.clocks, C.params, C.edges,
                parts=tuple((i,) for i in range(len(C.locations))))
    else:
        C = parallel_many(copies, name="%s^%d" % (A.name, n))
    return strip_trivial_loops(C), schemes


def rename_props_apart(A1, A2):
    """Rename A2's propositions that clash with A1's (with a warning)."""
    clash = A1.props & A2.props
    if not clash:
        return A2
    warnings.warn("renaming shared propositions %s in the second component" % sorted(clash))
    pm = {s: (s + "'" if s in clash else s) for s in A2.props}
    locs = tuple(Location(l.name, frozenset(pm[s] for s in l.labels), l.invariant)
                 for l in A2.locations)
    return Pta(A2.name, frozenset(pm.values()), locs, A2.initial, A2.clocks, A2.params,
               A2.edges)
