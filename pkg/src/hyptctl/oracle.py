"""Brute-force discrete-time semantics used as the reference for every other module.

A run of several paths is built from two kinds of moves: one time unit
passes on every path, or a nonempty set of paths each fires one edge at the
same instant.  The state reached after each move is a position.  Clocks are
capped at the largest constant plus one, which keeps the graph finite; the
horizon bounds both the elapsed time and the number of firing moves.

Rising, counter (eta) and recording (theta) values follow the per-step
reading: a proposition rises on a path when it holds in the new location and
did not hold in the old one.  theta is the time since the last rise, or since
the start if there was none.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
import sys

from .formula import (EXT, And, CountGe, CountMod, Exists, FalseF, Forall, Iff, Implies, Last,
                      Not, Or, ParamCmp, Prop, Temporal, TrueF, Xor, to_text)
from .model import ModelError, compare, valuate_pta


class OracleError(ModelError):
    pass


def _as_int(x, what):
    x = Fraction(x)
    if x.denominator != 1:
        raise OracleError("%s %s is not an integer; rescale the model first" % (what, x))
    return int(x)


class Semantics:
    """The capped discrete transition graph of one valuated PTA."""

    def __init__(self, A, v=None, cap=None):
        v = dict(v or {})
        Av = valuate_pta(A, {p: v[p] for p in A.params if p in v}) if A.params else A
        self.A = Av
        self.clocks = tuple(Av.clocks)
        index = {c: i for i, c in enumerate(self.clocks)}
        self.cap = cap if cap is not None else _as_int(Av.max_constant(), "constant") + 1

        def comp(g):
            out = []
            for a in g.atoms:
                k = _as_int(a.rhs.const, "constant")
                if len(a.lhs) == 2:
                    raise OracleError("diagonal constraints are not supported with clock capping")
                out.append((index[a.lhs[0]] if a.lhs else -1, a.rel, k))
            return tuple(out)

        self.inv = [comp(l.invariant) for l in Av.locations]
        self.labels = [l.labels for l in Av.locations]
        self.out = [[] for _ in Av.locations]
        for n, e in enumerate(Av.edges):
            self.out[e.source].append((n, comp(e.guard), tuple(sorted(index[c] for c in e.resets)),
                                       e.target))
        self.initial = tuple((l, (0,) * len(self.clocks)) for l in sorted(Av.initial)
                             if self._sat(self.inv[l], (0,) * len(self.clocks)))
        self._live = {}

    @staticmethod
    def _sat(g, mu):
        for i, rel, k in g:
            x = mu[i] if i >= 0 else 0
            if not compare(x, rel, k):
                return False
        return True

    def delay(self, s):
        l, mu = s
        cap = self.cap
        nu = tuple(x + 1 if x < cap else cap for x in mu)
        if not self._sat(self.inv[l], nu):
            return None
        return (l, nu)

    def firings(self, s):
        l, mu = s
        out = []
        for n, g, resets, target in self.out[l]:
            if not self._sat(g, mu):
                continue
            if resets:
                nu = list(mu)
                for i in resets:
                    nu[i] = 0
                nu = tuple(nu)
            else:
                nu = mu
            if self._sat(self.inv[target], nu):
                out.append((n, (target, nu)))
        return out

    def live(self, s):
        """Can s be extended to a path with infinitely many delays?"""
        r = self._live.get(s)
        if r is None:
            self._compute_live(s)
            r = self._live[s]
        return r

    def _compute_live(self, root):
        # reachable graph
        succ = {}
        stack = [root]
        while stack:
            s = stack.pop()
            if s in succ or s in self._live:
                continue
            d = self.delay(s)
            nxt = [(t, False) for _, t in self.firings(s)]
            if d is not None:
                nxt.append((d, True))
            succ[s] = nxt
            stack.extend(t for t, _ in nxt if t not in succ)
        comp = _tarjan(list(succ), lambda s: [t for t, _ in succ[s] if t in succ])
        good = set()
        for s, nxt in succ.items():
            for t, is_delay in nxt:
                if is_delay and t in succ and comp[s] == comp[t]:
                    good.add(s)
        # backward closure over the reachable part (plus already known states)
        pred = {s: [] for s in succ}
        for s, nxt in succ.items():
            for t, _ in nxt:
                if t in pred:
                    pred[t].append(s)
                elif self._live.get(t):
                    good.add(s)
        work = list(good)
        while work:
            t = work.pop()
            for s in pred[t]:
                if s not in good:
                    good.add(s)
                    work.append(s)
        for s in succ:
            self._live[s] = s in good


def _tarjan(nodes, succ):
    """Strongly connected components; returns node -> component id."""
    index, low, comp = {}, {}, {}
    stack, on = [], set()
    counter = [0]
    ncomp = [0]
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on.add(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if w in on:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on.discard(w)
                    comp[w] = ncomp[0]
                    if w == v:
                        break
                ncomp[0] += 1
    return comp


# ---------------------------------------------------------------------------
# cuts


@dataclass(frozen=True)
class Cut:
    states: tuple
    t: int
    k: int
    eta: tuple
    theta: tuple


class Runner:
    """Move generation for a fixed set of paths and tracked (prop, path) pairs."""

    def __init__(self, sem, npaths, tracked, horizon):
        self.sem = sem
        self.n = npaths
        self.tracked = tuple(tracked)
        self.h = horizon
        self.subsets = [c for r in range(1, npaths + 1) for c in combinations(range(npaths), r)]

    def initial(self):
        z = (0,) * len(self.tracked)
        for states in product(self.sem.initial, repeat=self.n):
            yield Cut(states, 0, 0, z, z)

    def moves(self, c):
        """``(fired_paths, cut)`` pairs; a delay has ``fired_paths == ()``."""
        out = []
        sem = self.sem
        if c.t < self.h:
            ds = []
            for s in c.states:
                d = sem.delay(s)
                if d is None:
                    break
                ds.append(d)
            else:
                out.append(((), Cut(tuple(ds), c.t + 1, c.k, c.eta,
                                    tuple(x + 1 for x in c.theta))))
        if c.k < self.h:
            fire = [sem.firings(s) for s in c.states]
            for sub in self.subsets:
                for combo in product(*[fire[i] for i in sub]):
                    states = list(c.states)
                    for i, (_, s) in zip(sub, combo):
                        states[i] = s
                    eta, theta = list(c.eta), list(c.theta)
                    for m, (sigma, pi) in enumerate(self.tracked):
                        if pi in sub:
                            old = sem.labels[c.states[pi][0]]
                            new = sem.labels[states[pi][0]]
                            if sigma in new and sigma not in old:
                                eta[m] += 1
                                theta[m] = 0
                    out.append((sub, Cut(tuple(states), c.t, c.k + 1, tuple(eta), tuple(theta))))
        return out

    def successors(self, c):
        return [d for _, d in self.moves(c)]

    def live(self, c):
        return all(self.sem.live(s) for s in c.states)


# ---------------------------------------------------------------------------
# operand evaluation


def _tracked_pairs(f, pathmap):
    out = []

    def add(s, pi):
        key = (s, pathmap[pi])
        if key not in out:
            out.append(key)

    for g in _walk(f):
        if isinstance(g, Last):
            add(g.s1, g.pi1)
            add(g.s2, g.pi2)
        elif isinstance(g, (CountGe, CountMod)):
            for s, pi, _ in g.terms:
                add(s, pi)
    return out


def _walk(f):
    yield f
    for a in ("arg", "left", "right", "lhs", "rhs", "body"):
        x = getattr(f, a, None)
        if x is not None and not isinstance(x, (str, int)):
            yield from _walk(x)


def compile_operand(f, pathmap, tracked, labels, v):
    """A predicate on cuts for a Boolean operand (atoms and extended predicates)."""
    slot = {p: i for i, p in enumerate(tracked)}

    def path(pi):
        if pi not in pathmap:
            raise OracleError("unbound path variable %r" % pi)
        return pathmap[pi]

    def go(f):
        if isinstance(f, TrueF):
            return lambda c: True
        if isinstance(f, FalseF):
            return lambda c: False
        if isinstance(f, Prop):
            i, name = path(f.path), f.name
            return lambda c: name in labels[c.states[i][0]]
        if isinstance(f, Last):
            a, b = slot[(f.s1, path(f.pi1))], slot[(f.s2, path(f.pi2))]
            rhs, rel = f.lt.evaluate(v), f.rel
            return lambda c: compare(c.theta[a] - c.theta[b], rel, rhs)
        if isinstance(f, CountGe):
            terms = [(slot[(s, path(pi))], a) for s, pi, a in f.terms]
            rel, d = f.rel, f.d
            return lambda c: compare(sum(a * c.eta[m] for m, a in terms), rel, d)
        if isinstance(f, CountMod):
            terms = [(slot[(s, path(pi))], a) for s, pi, a in f.terms]
            rel, d, n = f.rel, f.d, f.n
            return lambda c: compare(sum(a * c.eta[m] for m, a in terms) % n, rel, d)
        if isinstance(f, Not):
            x = go(f.arg)
            return lambda c: not x(c)
        if isinstance(f, Or):
            x, y = go(f.left), go(f.right)
            return lambda c: x(c) or y(c)
        if isinstance(f, And):
            x, y = go(f.left), go(f.right)
            return lambda c: x(c) and y(c)
        if isinstance(f, Implies):
            x, y = go(f.left), go(f.right)
            return lambda c: (not x(c)) or y(c)
        if isinstance(f, Iff):
            x, y = go(f.left), go(f.right)
            return lambda c: x(c) == y(c)
        if isinstance(f, Xor):
            x, y = go(f.left), go(f.right)
            return lambda c: x(c) != y(c)
        raise OracleError("operand must be Boolean (nest-free): %s" % to_text(f))

    return go(f)


# ---------------------------------------------------------------------------
# temporal operators


def _bound_value(bound, v):
    if bound is None:
        return None
    rel, gamma = bound
    g = v[gamma] if isinstance(gamma, str) else gamma
    return rel, Fraction(g)


def eval_temporal(A, v, node, horizon, sem=None):
    """Truth of one temporal operator from the empty path assignment."""
    if horizon <= 0:
        raise OracleError("horizon must be positive")
    sem = sem or Semantics(A, v)
    pathmap = {pi: i for i, pi in enumerate(node.paths)}
    lhs = node.lhs if node.lhs is not None else TrueF()
    tracked = _tracked_pairs(lhs, pathmap) + [p for p in _tracked_pairs(node.rhs, pathmap)
                                             if p not in _tracked_pairs(lhs, pathmap)]
    run = Runner(sem, len(node.paths), tracked, horizon)
    a = compile_operand(lhs, pathmap, tracked, sem.labels, v)
    b = compile_operand(node.rhs, pathmap, tracked, sem.labels, v)
    bv = _bound_value(node.bound, v)

    def in_bound(c):
        return bv is None or compare(c.t, bv[0], bv[1])

    kind, quant = node.kind, node.quant
    memo = {}
    limit = sys.getrecursionlimit()
    if limit < 10000:
        sys.setrecursionlimit(10000)

    if kind == "F":
        kind, a = "U", (lambda c: True)
    if kind == "G":
        kind, a = "R", (lambda c: False)
    if kind == "W":
        # a W b == b R (a | b)
        a0, b0 = a, b
        kind, a, b = "R", b0, (lambda c: a0(c) or b0(c))

    if kind == "U" and quant == "E":
        def f(c):
            r = memo.get(c)
            if r is None:
                if in_bound(c) and b(c) and run.live(c):
                    r = True
                elif a(c):
                    r = any(f(d) for d in run.successors(c))
                else:
                    r = False
                memo[c] = r
            return r
        return any(f(c) for c in run.initial())

    if kind == "U":
        def f(c):
            r = memo.get(c)
            if r is None:
                if not run.live(c):
                    r = True
                elif in_bound(c) and b(c):
                    r = True
                elif not a(c):
                    r = False
                else:
                    succ = run.successors(c)
                    r = bool(succ) and all(f(d) for d in succ)
                memo[c] = r
            return r
        return all(f(c) for c in run.initial())

    if kind == "R" and quant == "E":
        def f(c):
            r = memo.get(c)
            if r is None:
                if in_bound(c) and not b(c):
                    r = False
                elif a(c):
                    r = run.live(c)
                else:
                    succ = run.successors(c)
                    r = run.live(c) if not succ else any(f(d) for d in succ)
                memo[c] = r
            return r
        return any(f(c) for c in run.initial())

    if kind == "R":
        def f(c):
            r = memo.get(c)
            if r is None:
                if not run.live(c):
                    r = True
                elif in_bound(c) and not b(c):
                    r = False
                elif a(c):
                    r = True
                else:
                    r = all(f(d) for d in run.successors(c))
                memo[c] = r
            return r
        return all(f(c) for c in run.initial())
    raise OracleError("unknown temporal operator %r" % kind)


def eval_top(A, v, psi, horizon, grid=None):
    """Bounded discrete-time truth of a top-level formula at valuation v.

    ``grid`` maps a quantified parameter to its candidate values (default 0..horizon).
    """
    v = {p: Fraction(x) for p, x in (v or {}).items()}
    for p in A.params:
        if p not in v:
            raise OracleError("no value for parameter %r" % p)
    sems = {}

    def sem_for(v):
        key = tuple(v[p] for p in A.params)
        s = sems.get(key)
        if s is None:
            s = sems[key] = Semantics(A, v)
        return s

    def values(p):
        if grid and p in grid:
            return [Fraction(x) for x in grid[p]]
        return [Fraction(x) for x in range(horizon + 1)]

    def go(f, v):
        if isinstance(f, TrueF):
            return True
        if isinstance(f, FalseF):
            return False
        if isinstance(f, (Prop,) + EXT):
            # the empty path assignment satisfies no atom
            return False
        if isinstance(f, Not):
            return not go(f.arg, v)
        if isinstance(f, Or):
            return go(f.left, v) or go(f.right, v)
        if isinstance(f, And):
            return go(f.left, v) and go(f.right, v)
        if isinstance(f, Implies):
            return (not go(f.left, v)) or go(f.right, v)
        if isinstance(f, Iff):
            return go(f.left, v) == go(f.right, v)
        if isinstance(f, Xor):
            return go(f.left, v) != go(f.right, v)
        if isinstance(f, ParamCmp):
            if f.param not in v:
                raise OracleError("no value for parameter %r" % f.param)
            return compare(v[f.param], f.rel, f.lt.evaluate(v))
        if isinstance(f, Exists):
            return any(go(f.body, {**v, f.param: x}) for x in values(f.param))
        if isinstance(f, Forall):
            return all(go(f.body, {**v, f.param: x}) for x in values(f.param))
        if isinstance(f, Temporal):
            return eval_temporal(A, v, f, horizon, sem_for(v))
        raise OracleError("not a formula: %r" % (f,))

    return go(psi, v)


def grid_points(params, values):
    """Cartesian grid: every parameter ranges over ``values``."""
    for combo in product(values, repeat=len(params)):
        yield {p: Fraction(x) for p, x in zip(params, combo)}


def grid_synth(A, psi, grid, horizon):
    """The grid valuations at which psi holds."""
    return [dict(v) for v in grid if eval_top(A, v, psi, horizon)]


# ---------------------------------------------------------------------------
# explicit path assignments


@dataclass(frozen=True)
class PathAssignment:
    """Finite prefixes of several paths plus the interleaving of their firings.

    ``prefixes[pi]`` lists the (time, location, clocks) positions of one path;
    ``order`` is the move sequence, each move being ``("delay",)`` or
    ``("fire", ((pi, index), ...))`` where ``index`` is the position reached.
    """
    prefixes: tuple  # ((pi, positions), ...)
    order: tuple

    def prefix(self, pi):
        return dict(self.prefixes)[pi]

    def check(self):
        """Raise if the interleaving is not a valid preorder for the prefixes."""
        prefixes = dict(self.prefixes)
        next_index = {pi: 1 for pi in prefixes}
        now = 0
        for move in self.order:
            if move[0] == "delay":
                now += 1
                continue
            seen = set()
            for pi, i in move[1]:
                if pi in seen:
                    raise OracleError("path %r fires twice in one class" % pi)
                seen.add(pi)
                if i != next_index[pi]:
                    raise OracleError("positions of %r out of order" % pi)
                next_index[pi] += 1
                if prefixes[pi][i][0] != now:
                    raise OracleError("firing of %r at time %s placed at %s"
                                      % (pi, prefixes[pi][i][0], now))
        for pi, positions in prefixes.items():
            if next_index[pi] != len(positions):
                raise OracleError("unordered positions on %r" % pi)
            times = [p[0] for p in positions]
            if times != sorted(times):
                raise OracleError("time decreases along %r" % pi)
        return True


def enumerate_assignments(A, v, paths, horizon, limit=None):
    """Every path assignment for ``paths`` reachable within the horizon (discrete time).

    A path only records a position when it fires, so delays advance the
    shared clock and the timestamps of later positions.
    """
    sem = Semantics(A, v)
    n = len(paths)
    run = Runner(sem, n, (), horizon)
    count = 0
    for c0 in run.initial():
        stack = [(c0, tuple(((0, s[0], s[1]),) for s in c0.states), ())]
        while stack:
            c, pref, order = stack.pop()
            pa = PathAssignment(tuple(zip(paths, pref)), order)
            yield pa
            count += 1
            if limit is not None and count >= limit:
                return
            for sub, d in run.moves(c):
                if not sub:
                    stack.append((d, pref, order + (("delay",),)))
                    continue
                new_pref = list(pref)
                cls = []
                for i in sub:
                    new_pref[i] = pref[i] + ((d.t, d.states[i][0], d.states[i][1]),)
                    cls.append((paths[i], len(new_pref[i]) - 1))
                stack.append((d, tuple(new_pref), order + (("fire", tuple(cls)),)))


# ---------------------------------------------------------------------------
# observer cross-check


def observer_agreement(D, pred, v=None, horizon=8, name="__ext0", observer=None):
    """Compare an observer's verdict label with the direct predicate value.

    The observer for ``pred`` runs in product with the driver ``D``; every
    position reachable within the horizon is visited.  Returns
    ``(positions_checked, mismatches, uncovered)`` where ``uncovered`` lists
    driver positions that no product position projects to (a blocking observer).
    """
    from .compose import sync_product
    from .observers import observer_for

    O = observer if observer is not None else observer_for(pred, name)
    P = sync_product(D, O)
    sem = Semantics(P, v)
    paths = sorted({p for g in _walk(pred) for p in _pred_paths(g)})
    pathmap = {pi: 0 for pi in paths}
    tracked = _tracked_pairs(pred, pathmap)
    run = Runner(sem, 1, tracked, horizon)
    check = compile_operand(pred, pathmap, tracked, sem.labels, v or {})
    dsem = Semantics(D, v)
    nd = len(D.clocks)

    def project(c):
        l, mu = c.states[0]
        return (P.parts[l][0], tuple(min(x, dsem.cap) for x in mu[:nd]), c.t, c.k)

    seen, stack = set(), list(run.initial())
    covered = set()
    mismatches = []
    while stack:
        c = stack.pop()
        if c in seen:
            continue
        seen.add(c)
        covered.add(project(c))
        if (name in sem.labels[c.states[0][0]]) != check(c):
            mismatches.append(c)
        stack.extend(run.successors(c))
    drun = Runner(dsem, 1, (), horizon)
    dseen, stack = set(), list(drun.initial())
    while stack:
        c = stack.pop()
        if c in dseen:
            continue
        dseen.add(c)
        stack.extend(drun.successors(c))
    uncovered = [c for c in dseen if (c.states[0][0], c.states[0][1], c.t, c.k) not in covered]
    return len(seen), mismatches, uncovered


def _pred_paths(g):
    if isinstance(g, Last):
        return (g.pi1, g.pi2)
    if isinstance(g, (CountGe, CountMod)):
        return tuple(t[1] for t in g.terms)
    return ()
