import numpy as np
import pytest

from bezierpl import BezierCurve

QUAD = [[0, 0, 0], [2, 2, 0], [4, 0, 0]]
LINE3 = [[0, 0, 0], [1, 0, 0], [2, 0, 0], [3, 0, 0]]
TWIST3 = [[0, 0, 0], [1, 1, 0], [2, -1, 1], [3, 0, 0]]
CUSP3 = [[0, 0, 0], [1, 1, 0], [0, 1, 0], [1, 0, 0]]


@pytest.fixture
def quad():
    return BezierCurve(QUAD)


@pytest.fixture
def line3():
    return BezierCurve(LINE3)


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


def random_curve(rng, degree, scale=10.0):
    return BezierCurve(rng.uniform(-scale, scale, size=(degree + 1, 3)))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
