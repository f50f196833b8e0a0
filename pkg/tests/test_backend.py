import os

import pytest

from hyptctl.backend import (Context, SynthOptions, Unsupported, eu_synth, export_imitator,
                             imitator_texts, initial_states, reachable_states, symbolic_successors)
from hyptctl.formula import parse_formula
from hyptctl.imitator import validate_model, validate_property
from hyptctl.model import Atom, Guard, LinearTerm, Location, make_pta
from hyptctl.polyhedra import ConvexPoly, Lin, ParamSet
from hyptctl.reduce import reduce_all, reduce_synth

c, t = Lin.var("c"), Lin.var("t_abs")


def same(P, Q):
    return P.includes(Q) and Q.includes(P)


def one_edge(rel, rhs, params=()):
    return make_pta("e", [Location("l0"), Location("l1", frozenset({"goal"}))], ["l0"],
                    [("l0", Guard.of(Atom(("c",), rel, rhs)), set(), "l1")],
                    clocks=("c",), params=params)


def test_successor_records_transition_instant():
    A = one_edge("=", LinearTerm.make({}, 2))
    ctx = Context(A)
    (s0,) = initial_states(A, ctx)
    assert s0.poly.contains({"c": 5, "t_abs": 5})
    (s1,) = symbolic_successors(s0, A, ctx)
    assert s1.location == 1
    # entry: the instant of the jump, c = t_abs = 2; afterwards time may pass
    assert same(s1.entry, ConvexPoly.of(ctx.vars, [c.eq(2), t.eq(2)]))
    assert same(s1.poly, ConvexPoly.of(ctx.vars, [c.ge(2), t.eq(c)]))


def test_successor_parametric_guard(clkgen_drawn):
    ctx = Context(clkgen_drawn)
    (s0,) = initial_states(clkgen_drawn, ctx)
    succ = symbolic_successors(s0, clkgen_drawn, ctx)
    assert len(succ) == 1
    P = succ[0].entry.project(("t_abs", "p1"))
    tp, p1 = Lin.var("t_abs"), Lin.var("p1")
    # the first jump happens strictly between p1 - 1 and p1
    assert same(P, ConvexPoly.of(("t_abs", "p1"), [tp.lt(p1), tp.gt(p1 - 1), tp.ge(0)]))


def test_no_outgoing_edges():
    A = make_pta("s", [Location("a")], ["a"], [], clocks=("c",))
    ctx = Context(A)
    (s0,) = initial_states(A, ctx)
    assert symbolic_successors(s0, A, ctx) == []


def test_exact_duration_bound():
    A = one_edge("=", LinearTerm.param("p"), params=("p",))
    S = eu_synth(A, {0}, {1}, ("=", 3))
    assert S.equals(ParamSet.of(("p",), [Lin.var("p").eq(3)]))


def test_lower_duration_bound():
    A = one_edge("<=", LinearTerm.param("p"), params=("p",))
    # goal can be entered at any t <= p, and staying there keeps phi2 only on entry
    S = eu_synth(A, {0}, {1}, (">=", 2))
    assert S.equals(ParamSet.of(("p",), [Lin.var("p").ge(2)]))


def test_goal_in_both_sets_extends_over_time():
    A = one_edge("<=", LinearTerm.param("p"), params=("p",))
    S = eu_synth(A, {0, 1}, {1}, (">=", 2))
    assert S.equals(ParamSet.universe(("p",)))


def test_unreachable_goal():
    A = one_edge("<", LinearTerm.make({}, 0))
    assert eu_synth(A, {0}, {1}).is_empty()


def test_depth_limit_marks_partial(clkgen, deviation):
    S = reduce_synth(clkgen, deviation, SynthOptions(max_depth=2))
    assert S.partial


def test_universal_until_is_routed_to_export(clkgen):
    with pytest.raises(Unsupported) as ei:
        reduce_synth(clkgen, parse_formula("A [pi] (true U L@pi)"))
    assert "export" in str(ei.value)


def test_reachable_states(clkgen):
    states, ctx = reachable_states(clkgen)
    assert ctx.tabs is None
    assert {s.location for s in states} == {0, 1}


def test_export_worked_example(clkgen, deviation, tmp_path):
    (art,) = reduce_all(clkgen, deviation, "clkgen")
    imi, prop = export_imitator(art, str(tmp_path))
    assert os.path.basename(imi) == "clkgen.imi" and prop.endswith(".imiprop")
    M = validate_model(open(imi).read())
    assert validate_property(open(prop).read(), M)["operator"] == "EU"
    assert M["parameters"] == {"p1", "p2"}


def test_export_unit_model():
    A = make_pta("u", [Location("a", frozenset({"g"}))], ["a"], [])
    imi, prop = imitator_texts(A, frozenset({0}), frozenset({0}))
    M = validate_model(imi)
    assert validate_property(prop, M)
    assert len(M["automata"]["pta"]) == 1


def test_export_universal_notice(clkgen):
    (art,) = reduce_all(clkgen, parse_formula("A [pi] (H@pi U L@pi)"))
    imi, prop = imitator_texts(art.product, art.phi1sat, art.phi2sat, art.bound, art.quant,
                               art.params)
    assert validate_property(prop, validate_model(imi))["operator"] in ("AU", "AF")
    assert "builtin" in prop


def test_export_bounded_has_goal_location(clkgen):
    (art,) = reduce_all(clkgen, parse_formula("E [pi] (H@pi U{<= 2} L@pi)"))
    imi, prop = imitator_texts(art.product, art.phi1sat, art.phi2sat, art.bound, art.quant,
                               art.params)
    M = validate_model(imi)
    assert "lgoal" in M["automata"]["pta"]
    assert "t_abs" in M["clocks"]
    assert "lgoal" in prop


def test_export_is_deterministic(clkgen, deviation):
    a = imitator_texts(*_art_args(clkgen, deviation))
    b = imitator_texts(*_art_args(clkgen, deviation))
    assert a == b


def _art_args(A, psi):
    (art,) = reduce_all(A, psi)
    return art.product, art.phi1sat, art.phi2sat, art.bound, art.quant, art.params
