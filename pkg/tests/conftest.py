import math

import pytest
from shapely.geometry import Polygon as ShapelyPolygon

from selfsim.catalog import catalog

TAU = (1 + math.sqrt(5)) / 2


@pytest.fixture(scope="session")
def bee():
    return catalog("golden-bee")


@pytest.fixture(scope="session")
def square():
    return catalog("square-4")


@pytest.fixture(scope="session")
def trap31():
    return catalog("trapezoid(3,1)")


def shapely_of(poly):
    return ShapelyPolygon(poly.vertices)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
