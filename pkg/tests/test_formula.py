import random

from hypothesis import given, settings, strategies as st
import pytest

from gen import random_bool, random_ext, random_pta, random_temporal
from hyptctl.formula import (And, CountMod, Exists, FormulaError, NestedTemporalError, Not, Or,
                             ParamCmp, Prop, Temporal, TrueF, check_nest_free, classify_fragment,
                             desugar, formula_params, free_path_vars, is_core, parse_formula,
                             to_text)
from hyptctl.oracle import eval_top

OPACITY_HQ = ("E [pi1, pi2] ((~Goal@pi1 & ~Goal@pi2) U{= p} (Goal@pi1 & Goal@pi2 & "
       "COUNT(Private@pi1) = 0 & COUNT(Private@pi2) > 0))")


def test_parse_until_with_bound():
    f = parse_formula("E [pi1,pi2] ((Goal@pi1 = Goal@pi2) U{= p} (Goal@pi1 & Goal@pi2))")
    assert isinstance(f, Temporal)
    assert f.kind == "U" and f.quant == "E"
    assert f.bound == ("=", "p")
    assert f.paths == ("pi1", "pi2")


def test_parse_parameter_quantifier():
    f = parse_formula("exists p2. (p2 > p1 & E [pi1,pi2] ((L@pi1 -> H@pi2) U{= p2} (H@pi1 & H@pi2)))")
    assert isinstance(f, Exists) and f.param == "p2"
    assert isinstance(f.body, And)
    assert isinstance(f.body.left, ParamCmp)


def test_parse_zero_modulus():
    with pytest.raises(FormulaError):
        parse_formula("E<> [pi1] ((COUNT(a@pi1) mod 0 = 0))")


def test_parse_nested_rejected():
    with pytest.raises(NestedTemporalError):
        parse_formula("E [pi] (a@pi U (E [pi2] (true U a@pi2)))")


def test_parse_duplicate_binder():
    with pytest.raises(FormulaError):
        parse_formula("E [pi, pi] (true U a@pi)")


def test_parse_negative_count_outside_mod():
    with pytest.raises(FormulaError):
        parse_formula("E<> [pi1, pi2] (COUNT(a@pi1) - COUNT(a@pi2) = 1)")


def test_parse_mod_set():
    f = parse_formula("E<> [pi1] (((COUNT(a@pi1) - COUNT(b@pi1)) mod 4 in {0, 1, 3}))")
    mods = [g for g in _atoms(f.rhs) if isinstance(g, CountMod)]
    assert sorted(g.d for g in mods) == [0, 1, 3]


def _atoms(f):
    from hyptctl.formula import walk
    return list(walk(f))


def test_desugar_diamond():
    f = desugar(parse_formula("E<>{<= 3} [pi] (a@pi)"))
    assert f == Temporal("E", ("pi",), "U", ("<=", 3), TrueF(), Prop("a", "pi"))


def test_desugar_and():
    f = desugar(parse_formula("a@pi1 & b@pi1"))
    a, b = Prop("a", "pi1"), Prop("b", "pi1")
    assert f == Not(Or(Not(a), Not(b)))


def test_desugar_box_against_oracle():
    box = parse_formula("A[]{<= 2} [pi] (a@pi)")
    ref = parse_formula("~E [pi] (true U{<= 2} ~a@pi)")
    core = desugar(box)
    assert is_core(core)
    rng = random.Random(11)
    for _ in range(40):
        A = random_pta(rng, params=())
        assert eval_top(A, {}, core, 5) == eval_top(A, {}, ref, 5) == eval_top(A, {}, box, 5)


def test_free_path_vars():
    assert free_path_vars(parse_formula(OPACITY_HQ).rhs) == ("pi1", "pi2")
    assert free_path_vars(TrueF()) == ()
    assert free_path_vars(parse_formula("a@pi3")) == ("pi3",)


def test_formula_params():
    f = parse_formula("exists p2. (p2 > p1 & E [pi] (true U{<= p2} a@pi))")
    assert set(formula_params(f)) == {"p1", "p2"}


def test_check_nest_free_accepts_fixture(deviation):
    check_nest_free(desugar(deviation))


def test_classify_clkgen(clkgen, deviation):
    rep = classify_fragment(clkgen, deviation)
    assert rep.model_is_LU and rep.upper_params == ("p1",) and rep.lower_params == ()
    assert rep.formula_params_in_ext
    assert rep.verdict_class == "none"


def test_classify_nonparametric_opacity():
    from conftest import fixture_path
    from hyptctl.model import load_pta
    A = load_pta(fixture_path("opacity.pta"))
    rep = classify_fragment(A, parse_formula(OPACITY_HQ))
    assert rep.model_nonparametric and not rep.formula_params_in_ext
    assert rep.verdict_class == "TA+RP"
    assert "TA" in rep.also


def _random_top(rng):
    n = rng.choice((1, 2))
    paths = tuple("pi%d" % (i + 1) for i in range(n))
    t = random_temporal(rng, paths, ext=rng.random() < 0.5)
    if rng.random() < 0.3:
        t = Not(t)
    return t


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_print_parse_roundtrip(seed):
    f = _random_top(random.Random(seed))
    assert parse_formula(to_text(f)) == f


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_desugar_is_core_and_idempotent(seed):
    f = desugar(_random_top(random.Random(seed)))
    assert is_core(f)
    assert desugar(f) == f
    assert parse_formula(to_text(f)) == f
