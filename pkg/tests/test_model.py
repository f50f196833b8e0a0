from fractions import Fraction as F

from hypothesis import given, strategies as st
import pytest

from hyptctl.model import (Atom, Edge, Guard, LinearTerm, Location, ModelError, UnknownIdentifier,
                           eval_guard, format_pta, make_pta, merge_equal_clocks, parse_pta,
                           valuate_pta, validate_pta)

c_lt_p1 = Atom(("c",), "<", LinearTerm.param("p1"))
c_gt_p1m1 = Atom(("c",), ">", LinearTerm.make({"p1": 1}, -1))


def test_eval_guard_drawn_guard_true():
    g = Guard.of(c_gt_p1m1, c_lt_p1)
    assert eval_guard(g, {"c": F(3, 2)}, {"p1": F(9, 5)})


def test_eval_guard_empty_is_true():
    assert eval_guard(Guard(), {}, {})
    assert eval_guard(Guard(), {"c": F(7)}, {"p1": F(0)})


def test_eval_guard_false():
    assert not eval_guard(Guard.of(c_lt_p1), {"c": F(2)}, {"p1": F(9, 5)})


def test_eval_guard_unknown_parameter():
    with pytest.raises(UnknownIdentifier) as ei:
        eval_guard(Guard.of(c_lt_p1), {"c": F(0)}, {})
    assert ei.value.name == "p1"


def test_valuate_drawn_model(clkgen_drawn):
    B = valuate_pta(clkgen_drawn, {"p1": 2})
    assert B.params == ()
    assert str(B.locations[0].invariant) == "c <= 2"
    assert str(B.edges[0].guard) == "c > 1 & c < 2"


def test_valuate_parameter_free_identity():
    A = make_pta("t", [Location("a", frozenset({"x"}))], ["a"], [], clocks=("c",))
    assert valuate_pta(A, {}) == A


def test_valuate_rescale(clkgen_drawn):
    B = valuate_pta(clkgen_drawn, {"p1": F(3, 2)}, rescale=True)
    assert B.scale == 2
    assert str(B.locations[0].invariant) == "c <= 3"
    assert str(B.edges[0].guard) == "c > 1 & c < 3"


def test_validate_fixture(clkgen, clkgen_drawn):
    assert validate_pta(clkgen) == []
    assert validate_pta(clkgen_drawn) == []


def test_validate_bad_target(clkgen):
    from dataclasses import replace
    A = replace(clkgen, edges=clkgen.edges + (Edge(0, Guard(), frozenset(), 7),))
    diags = validate_pta(A)
    assert len(diags) == 1 and diags[0].level == "error"


def test_validate_trivial_self_loop(clkgen):
    from dataclasses import replace
    A = replace(clkgen, edges=clkgen.edges + (Edge(1, Guard(), frozenset(), 1),))
    diags = validate_pta(A)
    assert [d.level for d in diags] == ["warning"]


def test_parse_roundtrip(clkgen_drawn):
    assert parse_pta(format_pta(clkgen_drawn)) == clkgen_drawn


def test_parse_error_position():
    with pytest.raises(ModelError) as ei:
        parse_pta("pta x;\nclocks c;\nloc a initial inv d <= 1;\n")
    assert ei.value.line == 3


def test_parse_rejects_float():
    with pytest.raises(ModelError):
        parse_pta("pta x;\nclocks c;\nloc a initial inv c <= 1.5;\n")


def test_merge_equal_clocks():
    A = make_pta("m", [Location("a"), Location("b", invariant=Guard.of(
        Atom(("x", "y"), "<=", LinearTerm.make({}, 0))))], ["a"],
        [("a", Guard.of(Atom(("y",), "<", LinearTerm.make({}, 3))), {"x", "y"}, "b")],
        clocks=("x", "y"))
    B, mapping = merge_equal_clocks(A)
    assert mapping == {"y": "x"}
    assert B.clocks == ("x",)
    assert B.edges[0].resets == frozenset({"x"})
    # x - y <= 0 collapses to the clock-free 0 <= 0
    assert B.locations[1].invariant.atoms[0].lhs == ()


def test_merge_keeps_distinct_clocks(clkgen):
    B, mapping = merge_equal_clocks(clkgen)
    assert mapping == {} and B is clkgen


small = st.fractions(min_value=0, max_value=10, max_denominator=4)


@given(c=small, p=small, bump=st.fractions(min_value=0, max_value=5, max_denominator=3),
       rel=st.sampled_from(["<", "<="]), k=st.integers(1, 3))
def test_upper_bound_monotone(c, p, bump, rel, k):
    g = Guard.of(Atom(("c",), rel, LinearTerm.make({"p": k}, 0)))
    if eval_guard(g, {"c": c}, {"p": p}):
        assert eval_guard(g, {"c": c}, {"p": p + bump})
