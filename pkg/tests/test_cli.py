import json
import os

from conftest import fixture_path
from hyptctl import __version__
from hyptctl.cli import EXIT_FALSE, EXIT_OK, EXIT_PARTIAL, EXIT_USAGE, run
from hyptctl.imitator import validate_model, validate_property

OPACITY = fixture_path("opacity.pta")
OPACITY_EMPTY = fixture_path("opacity_empty.pta")
HQ = fixture_path("opacity.hq")


def test_version(capsys):
    assert run(["--version"]) == EXIT_OK
    assert __version__ in capsys.readouterr().out


def test_missing_subcommand():
    assert run([]) == EXIT_USAGE


def test_check_sat(capsys):
    assert run(["check", "-m", OPACITY, "-f", HQ]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("SAT") and "witness: p=" in out


def test_check_unsat(capsys):
    assert run(["check", "-m", OPACITY_EMPTY, "-f", HQ]) == EXIT_FALSE
    assert capsys.readouterr().out.strip() == "UNSAT"


def test_check_partial_is_distinguished(capsys):
    # depth 1 cannot reach Goal on both paths
    assert run(["check", "-m", OPACITY, "-f", HQ, "--max-depth", "1"]) == EXIT_PARTIAL


def test_synth_json(capsys):
    assert run(["synth", "-m", OPACITY, "-f", HQ, "--json"]) == EXIT_OK
    obj = json.loads(capsys.readouterr().out)
    assert obj["params"] == ["p"]


def test_synth_text(capsys):
    run(["synth", "-m", OPACITY, "-f", HQ])
    out = capsys.readouterr().out
    assert "p >= 3" in out and "p <= 4" in out


def test_reduce_writes_valid_files(tmp_path, capsys):
    out = tmp_path / "o"
    assert run(["reduce", "-m", fixture_path("coffee.pta"), "-f", HQ, "-o", str(out)]) == EXIT_OK
    m = validate_model((out / "coffee.imi").read_text())
    validate_property((out / "coffee.imiprop").read_text(), m)
    assert (out / "coffee.dot").exists()
    assert "__ext0 :=" in (out / "coffee.ptctl").read_text()


def test_export_backend(tmp_path, capsys):
    out = tmp_path / "e"
    assert run(["synth", "-m", OPACITY, "-f", HQ, "--backend", "export",
                "-o", str(out)]) == EXIT_OK
    assert sorted(os.listdir(out)) == ["opacity.imi", "opacity.imiprop"]


def test_classify_json(capsys):
    assert run(["classify", "-m", OPACITY, "-f", HQ, "--json"]) == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert rep["verdict_class"] == "TA+RP"
    assert rep["model_nonparametric"]


def test_oracle_grid(capsys):
    assert run(["oracle", "-m", OPACITY, "-f", HQ, "--grid", "p=0..6",
                "--horizon", "8"]) == EXIT_OK
    assert capsys.readouterr().out.split() == ["p=3", "p=4"]


def test_oracle_point(capsys):
    run(["oracle", "-m", OPACITY, "-f", HQ, "--valuation", "p=2", "--horizon", "8"])
    assert capsys.readouterr().out.strip() == "false"


def test_oracle_jobs_agree(capsys):
    run(["oracle", "-m", OPACITY, "-f", HQ, "--grid", "p=0..6", "--horizon", "8",
         "--jobs", "2", "--json"])
    assert [v["p"] for v in json.loads(capsys.readouterr().out)["satisfying"]] == ["3", "4"]


def test_dump(capsys):
    assert run(["dump", "-m", OPACITY]) == EXIT_OK
    assert "pta opacity" in capsys.readouterr().out
    run(["dump", "-m", OPACITY, "--format", "dot"])
    assert capsys.readouterr().out.startswith("digraph")
    run(["dump", "-m", OPACITY, "-f", "A[] [pi1] (Goal@pi1)"])
    out = capsys.readouterr().out
    assert "core:" in out


def test_bad_model(tmp_path, capsys):
    bad = tmp_path / "bad.pta"
    bad.write_text("pta b; clocks x; params;\nloc a initial; edge a -> zz;\n")
    assert run(["dump", "-m", str(bad)]) == EXIT_USAGE
    assert "bad.pta" in capsys.readouterr().err


def test_bad_formula(capsys):
    assert run(["check", "-m", OPACITY, "-f", "E [pi1] (Goal@"]) == EXIT_USAGE
    assert "formula" in capsys.readouterr().err


def test_missing_file(capsys):
    assert run(["dump", "-m", "/nonexistent.pta"]) == EXIT_USAGE
