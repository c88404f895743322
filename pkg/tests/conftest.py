import itertools

import pytest
from hypothesis import HealthCheck, settings

from robspan.geometry import GeomGraph, PointSet

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def path_graph(n: int) -> GeomGraph:
    V = PointSet.line(n)
    return GeomGraph(V, tuple((i, i + 1) for i in range(n - 1)))


def complete_graph(V: PointSet) -> GeomGraph:
    return GeomGraph(V, tuple(itertools.combinations(range(len(V)), 2)))


@pytest.fixture
def path5() -> GeomGraph:
    return path_graph(5)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
