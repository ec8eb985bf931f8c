import numpy as np
import pytest

from racahlab.sphere import Params3


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def k_generic():
    return Params3(0.7, 1.1, 0.4)


@pytest.fixture
def interior_points(rng):
    return rng.uniform(-0.9, 0.9, 50), rng.uniform(-0.9, 0.9, 50)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for i in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[i].line())
