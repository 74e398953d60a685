import sys

import pytest
from hypothesis import HealthCheck, settings

from arbor.graphs import FiniteTree

settings.register_profile(
    "arbor", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("arbor")


@pytest.fixture
def double_star():
    """Adjacent centers 0 and 1; leaves 2, 3 at 0 and 4, 5 at 1."""
    return FiniteTree.from_edges(6, [(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)])


@pytest.fixture
def caterpillar():
    """Spine 0-1-2-3-4; leaves 5, 6 at 0; 7, 8 at 4; 9 at 1."""
    return FiniteTree.from_edges(10, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 5), (0, 6), (4, 7), (4, 8), (1, 9)])


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(acceptance.RESULTS):
        terminalreporter.write_line(acceptance.RESULTS[number])
