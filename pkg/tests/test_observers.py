import random

from hypothesis import given, settings, strategies as st

from gen import random_pta
from hyptctl.formula import CountGe, CountMod, Last, Prop, parse_formula, desugar
from hyptctl.model import LinearTerm
from hyptctl.observers import (build_observer_product, missing_moves, observer_count_ge,
                               observer_count_mod, observer_last)
from hyptctl.oracle import observer_agreement
from hyptctl.reduce import reduce_n


def _loc(O, name):
    return next(i for i, l in enumerate(O.locations) if l.name == name)


def test_last_parametric_size():
    # 0 < p and 0 >= p are both satisfiable, so no initial location is dropped
    O = observer_last("a", "b", "<", LinearTerm.param("p"))
    assert len(O.locations) == 16
    assert O.clocks == ("__ext0_c1", "__ext0_c2")
    assert len(O.initial) == 8
    assert all(not O.locations[i].name.endswith("T)") for i in O.initial)


def test_last_nonnegative_bound_prunes_initials():
    # 0 > p is unsatisfiable for p >= 0: only verdict-true initials remain
    O = observer_last("a", "b", "<=", LinearTerm.param("p"))
    assert len(O.locations) == 12
    assert all("__ext0" in O.locations[i].labels for i in O.initial)


def test_last_zero_equality_drops_initials():
    O = observer_last("a", "b", "=", LinearTerm.make({}, 0))
    for i in O.initial:
        assert "__ext0" in O.locations[i].labels
        assert O.locations[i].invariant.atoms[0].lhs == ()
    assert len(O.initial) == 4


def test_last_rise_guard_substitutes_zero():
    # rise of H_2 from a location where H_1 holds: c2 is reset, the test is on c1 alone
    O = observer_last("H_1", "H_2", "<=", LinearTerm.param("p2"))
    src = _loc(O, "({H_1},T)")
    found = {}
    for e in O.edges:
        if e.source == src and e.resets == frozenset({"__ext0_c2"}):
            tgt = O.locations[e.target]
            found["__ext0" in tgt.labels] = str(e.guard)
    assert found == {True: "__ext0_c1 <= p2", False: "__ext0_c1 > p2"}


def test_observers_are_complete():
    for O, mon in [(observer_last("a", "b", "<", LinearTerm.param("p")), {"a", "b"}),
                   (observer_count_ge((("a", 1), ("b", 2)), ">=", 2), {"a", "b"}),
                   (observer_count_mod((("a", 1), ("b", -1)), 3, "=", 0), {"a", "b"})]:
        assert missing_moves(O, mon) == []


def test_count_ge_saturates():
    O = observer_count_ge((("a", 1),), "=", 1)
    names = sorted(l.name for l in O.locations)
    assert names == ["({a},0)", "({a},1)", "({a},2)", "({},0)", "({},1)", "({},2)"]
    src = _loc(O, "({},2)")
    assert {O.locations[e.target].name for e in O.edges if e.source == src} == {"({},2)", "({a},2)"}
    src = _loc(O, "({},1)")
    assert "({a},2)" in {O.locations[e.target].name for e in O.edges if e.source == src}
    assert O.clocks == () and O.params == ()


def test_count_zero_labelling():
    O = observer_count_ge((("Private", 1),), "=", 0)
    for l in O.locations:
        assert ("__ext0" in l.labels) == l.name.endswith(",0)")


def test_count_ge_stutter_keeps_counter():
    O = observer_count_ge((("a", 1),), ">=", 1)
    src = _loc(O, "({a},1)")
    assert {O.locations[e.target].name for e in O.edges if e.source == src} == {"({a},1)", "({},1)"}


def test_count_mod_wraps():
    O = observer_count_mod((("a", 1),), 4, "=", 0)
    src = _loc(O, "({},3)")
    assert {O.locations[e.target].name for e in O.edges if e.source == src} == {"({},3)", "({a},0)"}


def test_count_mod_joint_rise():
    O = observer_count_mod((("H_1", 1), ("H_2", -1)), 4, "=", 0)
    src = _loc(O, "({},0,0)")
    assert "__ext0" in O.locations[src].labels
    tgts = {O.locations[e.target].name for e in O.edges if e.source == src}
    assert "({H_1,H_2},1,1)" in tgts
    assert "__ext0" in O.locations[_loc(O, "({H_1,H_2},1,1)")].labels
    assert O.clocks == () and O.params == ()


def test_product_without_predicates():
    f = parse_formula("E [pi] (a@pi U b@pi)")
    O, stripped, legend = build_observer_product(f)
    assert len(O.locations) == 1 and not O.edges
    assert stripped == f and legend == []


def test_product_deduplicates():
    f = parse_formula("E [pi] ((COUNT(a@pi) >= 1) U (COUNT(a@pi) >= 1 & b@pi))")
    O, stripped, legend = build_observer_product(f)
    assert len(legend) == 1
    assert stripped.lhs == Prop("__ext0", "pi")


def test_product_for_running_example(deviation):
    red = reduce_n(desugar(deviation), 2)
    O, stripped, legend = build_observer_product(red)
    texts = [t for _, t in legend]
    assert sum("mod 4" in t for t in texts) == 3
    assert sum("LAST" in t for t in texts) == 2


def _random_pred(rng, kind):
    if kind == "last":
        return Last("a", "pi", "b", "pi", rng.choice(("<", "<=", "=", ">=", ">")),
                    LinearTerm.make({}, rng.randint(-3, 3)))
    if kind == "ge":
        return CountGe((("a", "pi", rng.randint(0, 2)), ("b", "pi", rng.randint(1, 2))),
                       rng.choice(("<", "<=", "=", ">=", ">")), rng.randint(0, 3))
    return CountMod((("a", "pi", 1), ("b", "pi", -1)), rng.randint(2, 4),
                    rng.choice(("=", "<", ">=")), rng.randint(0, 1))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10 ** 6), kind=st.sampled_from(["last", "ge", "mod"]))
def test_observer_matches_direct_evaluation(seed, kind):
    rng = random.Random(seed)
    D = random_pta(rng, params=())
    n, mismatches, uncovered = observer_agreement(D, _random_pred(rng, kind), horizon=6)
    assert n > 0 and mismatches == [] and uncovered == []
