"""Smoke runs over the bundled models and formulas."""

import pytest

from conftest import fixture_path
from hyptctl.backend import SynthOptions, export_imitator
from hyptctl.formula import parse_formula
from hyptctl.imitator import validate_model, validate_property
from hyptctl.model import load_pta
from hyptctl.reduce import model_check, reduce_all

PAIRS = [("opacity", "opacity"), ("opacity_empty", "opacity"), ("coffee", "opacity"),
         ("stac", "opacity"), ("atm", "robond"), ("coffee", "ef2"), ("fifo", "unfair"),
         ("wfas", "robond"), ("coffee", "robond"), ("coffee", "ef3"),
         ("clkgen", "deviation"), ("stac", "robond")]


def load(m, f):
    with open(fixture_path(f + ".hq")) as fh:
        return load_pta(fixture_path(m + ".pta")), parse_formula(fh.read())


@pytest.mark.parametrize("m, f, holds", [
    ("opacity", "opacity", True), ("opacity_empty", "opacity", False),
    ("coffee", "opacity", True), ("stac", "opacity", True), ("atm", "robond", True),
    ("coffee", "ef2", True),
])
def test_complete_verdicts(m, f, holds):
    r = model_check(*load(m, f), SynthOptions(timeout=60))
    assert not r.partial
    assert r.holds == holds
    if holds:
        assert r.params.contains(r.witness)


def test_atm_threshold():
    r = model_check(*load("atm", "robond"), SynthOptions(timeout=60))
    assert r.params.contains({"p": 2}) and not r.params.contains({"p": 3})


@pytest.mark.slow
def test_fifo_unfair_unsat():
    r = model_check(*load("fifo", "unfair"), SynthOptions(timeout=120))
    assert not r.partial and not r.holds


@pytest.mark.parametrize("m, f", [("wfas", "robond"), ("coffee", "robond")])
def test_partial_runs_still_find_witnesses(m, f):
    # under-approximation: whatever is found is genuine
    r = model_check(*load(m, f), SynthOptions(timeout=8))
    assert r.holds
    assert r.params.contains(r.witness)


@pytest.mark.parametrize("m, f", PAIRS)
def test_export_validates(m, f, tmp_path):
    A, psi = load(m, f)
    for art in reduce_all(A, psi, m):
        imi, prop = export_imitator(art, str(tmp_path))
        with open(imi) as fh:
            summary = validate_model(fh.read())
        with open(prop) as fh:
            validate_property(fh.read(), summary)
