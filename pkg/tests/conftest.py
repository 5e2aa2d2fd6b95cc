from fractions import Fraction

import pytest

from couples.core import NEG_INF, StepFunction
from couples.measure import BorelMeasure

F = Fraction


def chi(a, b, c=1):
    return StepFunction.indicator(a, b, c)


def atom_indicator(k, c=1):
    """``c`` at the atom ``k`` of the geometric measure, 0 elsewhere on the line."""
    return StepFunction(NEG_INF, (k, F(2 * k + 1, 2)), (0, c), 0)


@pytest.fixture
def a():
    return chi(0, 1)


@pytest.fixture
def b():
    return chi(1, 3)


@pytest.fixture
def g():
    return chi(0, 1, 2) + chi(1, 3)


@pytest.fixture(scope="session")
def geo():
    return BorelMeasure.geometric_atoms(20)


@pytest.fixture(scope="session")
def one_line():
    return StepFunction.constant(1, NEG_INF)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
