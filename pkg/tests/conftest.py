import os
import sys
import warnings

import pytest

HERE = os.path.dirname(__file__)
sys.path.insert(0, HERE)
FIXTURES = os.path.join(os.path.dirname(HERE), "fixtures")


def fixture_path(name):
    return os.path.join(FIXTURES, name)


@pytest.fixture
def clkgen():
    from hyptctl.model import load_pta
    return load_pta(fixture_path("clkgen.pta"))


@pytest.fixture
def clkgen_drawn():
    from hyptctl.model import load_pta
    return load_pta(fixture_path("clkgen_drawn.pta"))


@pytest.fixture
def deviation():
    from hyptctl.formula import parse_formula
    with open(fixture_path("deviation.hq")) as fh:
        return parse_formula(fh.read())


@pytest.fixture(autouse=True)
def _quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield


# one line per acceptance criterion, printed after the run
CRITERIA = []


def report(tag, ok, detail=""):
    line = "%s %s%s" % ("PASS" if ok else "FAIL", tag, (": " + detail) if detail else "")
    CRITERIA.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA:
            terminalreporter.write_line(line)
