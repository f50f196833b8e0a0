from fractions import Fraction as F
import random

import pytest

from gen import random_pta, random_temporal
from hyptctl.compose import self_compose
from hyptctl.formula import CountMod, Last, Prop, Temporal, desugar, parse_formula, walk
from hyptctl.model import Location, make_pta
from hyptctl.oracle import eval_top
from hyptctl.backend import SynthOptions
from hyptctl.polyhedra import Lin, ParamSet
from hyptctl.reduce import (PI, ReductionError, all_params, model_check, reduce_all, reduce_n,
                            reduce_synth)


def test_reduce_n_indexes_propositions():
    f = parse_formula("E [pi1, pi2] ((L@pi1 -> H@pi2) U (H@pi1 & H@pi2))")
    r = reduce_n(f, 2)
    assert r.paths == (PI,)
    props = {g.name for g in walk(r) if isinstance(g, Prop)}
    assert props == {"L_1", "H_2", "H_1"}


def test_reduce_n_running_example(deviation):
    r = reduce_n(desugar(deviation), 2)
    mods = {g for g in walk(r) if isinstance(g, CountMod)}
    assert CountMod((("H_1", PI, 1), ("H_2", PI, -1)), 4, "=", 0) in mods
    lasts = {g for g in walk(r) if isinstance(g, Last)}
    assert {(g.s1, g.s2) for g in lasts} == {("H_1", "H_2")}
    assert all(p == PI for g in walk(r) if isinstance(g, Prop) for p in [g.path])


def test_reduce_n_unbound_path():
    f = Temporal("E", ("pi1",), "U", None, Prop("a", "pi1"), Prop("a", "pi9"))
    with pytest.raises(ReductionError):
        reduce_n(f, 1)


def test_reduce_n_arity_mismatch():
    with pytest.raises(ReductionError):
        reduce_n(parse_formula("E [pi1, pi2] (true U a@pi1)"), 3)


def test_reduction_preserves_truth():
    rng = random.Random(8)
    for _ in range(30):
        A = random_pta(rng)
        phi = random_temporal(rng, ("pi1", "pi2"))
        A2, _ = self_compose(A, 2)
        for p in range(3):
            assert eval_top(A, {"p": p}, phi, 5) == eval_top(A2, {"p": p}, reduce_n(phi, 2), 5)


def test_algorithm_cases(clkgen):
    assert reduce_synth(clkgen, parse_formula("true")).equals(ParamSet.universe(("p1",)))
    assert reduce_synth(clkgen, parse_formula("H@pi1")).is_empty()
    S = reduce_synth(clkgen, parse_formula("p1 >= 2 | ~(p1 >= 1)"))
    p1 = Lin.var("p1")
    assert S.equals(ParamSet.of(("p1",), [p1.ge(2)]).union(ParamSet.of(("p1",), [p1.lt(1)])))
    for k in range(0, 9):
        v = F(k, 2)
        assert S.contains({"p1": v}) == (v >= 2 or v < 1)


def test_parameter_quantifier_projects(clkgen):
    S = reduce_synth(clkgen, parse_formula("exists q. (q > p1 & q < 3)"))
    assert S.params == ("p1", "q")
    assert S.contains({"p1": 2, "q": 0}) and not S.contains({"p1": 3, "q": 0})


def test_all_params_order(clkgen, deviation):
    assert all_params(clkgen, deviation) == ("p1", "p2")


def test_model_check_example_after_definition(clkgen):
    psi = parse_formula("exists p2. (p2 > p1 & E [pi1, pi2] ((L@pi1 -> H@pi2) U{= p2} "
                        "(H@pi1 & H@pi2)))")
    # p2 is unbounded, so exploration alone never stops; a depth cap suffices here
    r = model_check(clkgen, psi, SynthOptions(max_depth=4))
    assert r.holds
    assert r.params.contains({"p1": F(9, 5), "p2": 0})
    assert r.params.contains(r.witness)


def test_model_check_unreachable():
    A = make_pta("u", [Location("a"), Location("g", frozenset({"Goal"}))], ["a"], [])
    r = model_check(A, parse_formula("E<> [pi1] (Goal@pi1)"))
    assert not r.holds and r.witness is None


def test_model_check_empty_half_space(clkgen):
    assert not model_check(clkgen, parse_formula("p1 < p1")).holds


def test_universality(clkgen):
    r = model_check(clkgen, parse_formula("p1 >= 0"), universality=True)
    assert r.holds and r.universal
    r = model_check(clkgen, parse_formula("p1 >= 1"), universality=True)
    assert r.holds and r.universal is False


def test_reduce_all_names_several_nodes(clkgen):
    psi = parse_formula("E<> [pi] (L@pi) & ~E<>{<= 1} [pi] (L@pi)")
    arts = reduce_all(clkgen, psi, "m")
    assert [a.name for a in arts] == ["m_1", "m_2"]
    assert arts[1].bound == ("<=", 1)


def test_running_example_artifacts(clkgen, deviation):
    (art,) = reduce_all(clkgen, deviation)
    # two system clocks and two LAST clocks; the second LAST clock pair merges
    assert len(art.product.clocks) == 4
    assert [n for n, _ in art.legend] == ["__ext%d" % k for k in range(5)]
    assert art.phi2sat and art.phi2sat <= set(range(len(art.product.locations)))
    assert art.quant == "E" and art.bound is None
