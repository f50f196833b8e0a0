"""The reduce^n transformation and the synthesis driver built on it."""

from dataclasses import dataclass, field
import logging

from . import backend
from .backend import SynthOptions, Unsupported
from .compose import indexed, self_compose, sync_product
from .formula import (EXT, And, CountGe, CountMod, Exists, FalseF, FormulaError, Forall, Iff,
                      Implies, Last, Not, Or, ParamCmp, Prop, Temporal, TrueF, Xor, check_nest_free,
                      desugar, formula_params, temporal_nodes, to_text)
from .model import merge_equal_clocks, validate_pta
from .observers import build_observer_product
from .polyhedra import ConvexPoly, Lin, ParamSet

log = logging.getLogger(__name__)

PI = "pi"


class ReductionError(FormulaError):
    pass


def _order(f, n, order):
    if order is not None:
        order = tuple(order)
    elif isinstance(f, Temporal):
        order = tuple(f.paths)
    else:
        order = tuple("pi%d" % (i + 1) for i in range(n))
    if len(order) != n:
        raise ReductionError("expected %d path variables, got %d" % (n, len(order)))
    return {pi: i + 1 for i, pi in enumerate(order)}


def reduce_n(phi, n, order=None):
    """Rewrite a formula over paths pi_1..pi_n into one over the single path ``pi``.

    Proposition ``s`` of path ``pi_i`` becomes ``s_i``; temporal binders collapse.
    """
    idx = _order(phi, n, order)

    def ix(s, path):
        if path not in idx:
            raise ReductionError("unbound path variable %r" % path)
        return indexed(s, idx[path])

    def go(f):
        if isinstance(f, (TrueF, FalseF, ParamCmp)):
            return f
        if isinstance(f, Prop):
            return Prop(ix(f.name, f.path), PI)
        if isinstance(f, Last):
            return Last(ix(f.s1, f.pi1), PI, ix(f.s2, f.pi2), PI, f.rel, f.lt)
        if isinstance(f, CountGe):
            return CountGe(tuple((ix(s, p), PI, a) for s, p, a in f.terms), f.rel, f.d)
        if isinstance(f, CountMod):
            return CountMod(tuple((ix(s, p), PI, a) for s, p, a in f.terms), f.n, f.rel, f.d)
        if isinstance(f, Not):
            return Not(go(f.arg))
        if isinstance(f, (Or, And, Implies, Iff, Xor)):
            return type(f)(go(f.left), go(f.right))
        if isinstance(f, Temporal):
            return Temporal(f.quant, (PI,), f.kind, f.bound,
                            None if f.lhs is None else go(f.lhs), go(f.rhs))
        if isinstance(f, (Exists, Forall)):
            return type(f)(f.param, go(f.body))
        raise TypeError("not a formula: %r" % (f,))

    return go(phi)


def holds_on_labels(f, labels):
    """Truth of a Boolean single-path operand at a location with these labels."""
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Prop):
        return f.name in labels
    if isinstance(f, Not):
        return not holds_on_labels(f.arg, labels)
    if isinstance(f, Or):
        return holds_on_labels(f.left, labels) or holds_on_labels(f.right, labels)
    if isinstance(f, And):
        return holds_on_labels(f.left, labels) and holds_on_labels(f.right, labels)
    if isinstance(f, Implies):
        return (not holds_on_labels(f.left, labels)) or holds_on_labels(f.right, labels)
    if isinstance(f, Iff):
        return holds_on_labels(f.left, labels) == holds_on_labels(f.right, labels)
    if isinstance(f, Xor):
        return holds_on_labels(f.left, labels) != holds_on_labels(f.right, labels)
    raise ReductionError("operand is not Boolean over propositions: %s" % to_text(f))


@dataclass
class ReductionArtifacts:
    name: str
    product: object
    formula: object
    phi1sat: frozenset
    phi2sat: frozenset
    bound: object
    quant: str
    params: tuple
    renamings: tuple = ()
    legend: tuple = ()
    formula_text: str = ""
    source: object = field(default=None, repr=False)


def reduce_temporal(A, node, params=None, name=None):
    """Self-compose, attach observers and precompute the operand location sets."""
    n = len(node.paths)
    red = reduce_n(node, n)
    C, schemes = self_compose(A, n)
    O, stripped, legend = build_observer_product(red)
    P = sync_product(C, O, prune=True)
    P, merged = merge_equal_clocks(P)
    if merged:
        log.info("clocks merged into their representatives: %s", merged)
    lhs = stripped.lhs if stripped.lhs is not None else TrueF()
    phi1 = frozenset(i for i, l in enumerate(P.locations) if holds_on_labels(lhs, l.labels))
    phi2 = frozenset(i for i, l in enumerate(P.locations) if holds_on_labels(stripped.rhs, l.labels))
    params = tuple(params) if params is not None else all_params(A, node)
    return ReductionArtifacts(name or A.name, P, stripped, phi1, phi2, stripped.bound,
                              stripped.quant, params, tuple(schemes), tuple(legend),
                              to_text(stripped), node)


def all_params(A, psi):
    out = list(A.params)
    for p in formula_params(psi):
        if p not in out:
            out.append(p)
    return tuple(out)


def prepare(A, psi):
    """Validation and desugaring shared by every entry point."""
    for d in validate_pta(A):
        if d.level == "error":
            raise ReductionError("invalid model: %s" % d.message)
    core = desugar(psi)
    check_nest_free(core)
    return core


def reduce_all(A, psi, name=None):
    """Artifacts for every temporal sub-formula, in order of occurrence."""
    core = prepare(A, psi)
    params = all_params(A, psi)
    nodes = list(dict.fromkeys(temporal_nodes(core)))
    base = name or A.name
    out = []
    for k, t in enumerate(nodes):
        nm = base if len(nodes) == 1 else "%s_%d" % (base, k + 1)
        out.append(reduce_temporal(A, t, params, nm))
    return out


_REL = {"<": "lt", "<=": "le", "=": "eq", ">=": "ge", ">": "gt"}


def _half_space(params, f):
    lhs = Lin.var(f.param)
    rhs = Lin({p: a for p, a in f.lt.coeffs}, f.lt.const)
    return ParamSet(params, [ConvexPoly.of(params, [getattr(lhs, _REL[f.rel])(rhs)])])


def reduce_synth(A, psi, opts=None):
    """Parameter valuations (over model then formula parameters) satisfying psi."""
    opts = opts or SynthOptions()
    core = prepare(A, psi)
    params = all_params(A, psi)
    cache = {}

    def go(f):
        if isinstance(f, TrueF):
            return ParamSet.universe(params)
        if isinstance(f, (Prop,) + EXT):
            # does not hold for the empty path assignment
            return ParamSet.empty(params)
        if isinstance(f, Not):
            return go(f.arg).complement()
        if isinstance(f, Or):
            return go(f.left).union(go(f.right))
        if isinstance(f, ParamCmp):
            return _half_space(params, f)
        if isinstance(f, Exists):
            return go(f.body).eliminate(f.param)
        if isinstance(f, Temporal):
            if f not in cache:
                cache[f] = temporal(f)
            return cache[f]
        raise ReductionError("unexpected construct after desugaring: %s" % to_text(f))

    def temporal(t):
        if t.quant == "A":
            raise Unsupported("universal until is not supported by the builtin backend; "
                              "use the export backend (IMITATOR)")
        art = reduce_temporal(A, t, params)
        log.info("product for %s: %d locations, %d edges", to_text(t),
                 len(art.product.locations), len(art.product.edges))
        return backend.eu_synth(art.product, art.phi1sat, art.phi2sat, art.bound, opts, params)

    res = go(core)
    partial = any(r.partial for r in cache.values())
    if partial and not res.partial:
        res = ParamSet(res.params, res.polys, res.is_universe, partial=True, _canon=False)
    return res


@dataclass
class CheckResult:
    holds: bool
    witness: dict
    params: ParamSet
    universal: bool = None

    @property
    def partial(self):
        return self.params.partial


def model_check(A, psi, opts=None, universality=False):
    """Is there a valuation satisfying psi?  With ``universality``, also decide
    whether every valuation does (via emptiness of the complement)."""
    S = reduce_synth(A, psi, opts)
    w = S.sample()
    universal = None
    if universality:
        universal = S.complement().is_empty()
    return CheckResult(w is not None, w, S, universal)
