from fractions import Fraction

import pytest

from markovtree.markov import MarkovMap
from markovtree.tree import make_star


def tent() -> MarkovMap:
    """Tent map on the arc s1 - b - s2 (legs of length 1)."""
    return MarkovMap(make_star(2), {"s1": "s1", "b": "s2", "s2": "s1"})


def golden() -> MarkovMap:
    """Interval map with transition matrix [[1,1],[1,0]]."""
    return MarkovMap(make_star(2), {"s1": "s2", "b": "s1", "s2": "b"})


@pytest.fixture
def tent_map():
    return tent()


@pytest.fixture
def half():
    return Fraction(1, 2)


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
