import warnings

import pytest

from oracles import KITE_A, KITE_B
from symm_pg import Disc, Ellipse, TrigCurve, assemble_operator
from symm_pg.errors import TruncationWarning


@pytest.fixture(scope="session")
def disc():
    return Disc()


@pytest.fixture(scope="session")
def ellipse():
    return Ellipse(2.0, 1.0)


@pytest.fixture(scope="session")
def kite():
    return TrigCurve(KITE_A, KITE_B)


@pytest.fixture(scope="session")
def assemble():
    cache = {}

    def build(curve, M, m=None):
        key = (curve, M, m)
        if key not in cache:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", TruncationWarning)
                cache[key] = assemble_operator(curve, M, m)
        return cache[key]

    return build


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = {}


@pytest.fixture
def report_criterion():
    def record(number, ok, detail):
        ACCEPTANCE_LINES[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
