import pytest

from hyptctl.imitator import ImitatorSyntaxError, validate_model, validate_property

GOOD = """
(* outer (* nested *) comment *)
var
  x, y : clock;
  p : parameter;
  k : constant = 3;

automaton pta
  actions: ;
  loc l0: invariant x <= p
    when x >= 1 do {x := 0} goto l1;
  loc l1: invariant True
    when y = k & x <= 2 goto l0;
    when True goto l1;
  urgent loc lgoal: invariant True
end

init := {
  discrete =
    loc[pta] := l0,
  ;
  continuous =
    & x = 0
    & y = 0
    & p >= 0
  ;
}

end
"""


def test_accepts_model():
    s = validate_model(GOOD)
    assert s["clocks"] == {"x", "y"}
    assert s["parameters"] == {"p"}
    assert s["automata"]["pta"] == {"l0", "l1", "lgoal"}
    assert s["initial"] == {"pta": "l0"}


@pytest.mark.parametrize("bad, what", [
    (GOOD.replace("x >= 1 do", "z >= 1 do"), "z"),
    (GOOD.replace("goto l1;\n  loc l1", "goto l9;\n  loc l1"), "l9"),
    (GOOD.replace("loc[pta] := l0", "loc[pta] := nowhere"), "nowhere"),
    (GOOD.replace("(* nested *)", "(* nested "), "comment"),
    (GOOD.replace("do {x := 0}", "do {p := 0}"), "clock"),
    (GOOD.replace("p : parameter;", "p : parameter;\n  x : clock;"), "twice"),
    (GOOD.replace("loc l1: invariant True", "loc l0: invariant True"), "twice"),
])
def test_rejects_model(bad, what):
    with pytest.raises(ImitatorSyntaxError, match=what):
        validate_model(bad)


def test_error_carries_position():
    try:
        validate_model(GOOD.replace("x >= 1 do", "x >= 1 dox"))
    except ImitatorSyntaxError as e:
        assert e.line is not None
    else:
        raise AssertionError("accepted")


def test_property():
    m = validate_model(GOOD)
    assert validate_property("property := #synth EF(loc[pta] = lgoal);", m)["operator"] == "EF"
    assert validate_property("property := #synth EU(loc[pta] = l0 or loc[pta] = l1, "
                             "loc[pta] = lgoal);", m)["operator"] == "EU"
    validate_property("property := #synth AGnot(not(loc[pta] = l0) and True);", m)


@pytest.mark.parametrize("bad", [
    "property := #synth XF(loc[pta] = lgoal);",
    "property := #synth EU(loc[pta] = l0);",
    "property := #synth EF(loc[pta] = nowhere);",
    "property := #synth EF(loc[pta] = lgoal)",
    "property := #synth EF(loc[pta] = lgoal); extra",
])
def test_rejects_property(bad):
    with pytest.raises(ImitatorSyntaxError):
        validate_property(bad, validate_model(GOOD))
