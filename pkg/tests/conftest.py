import numpy as np
import pytest

from strongstab import nevpick
from strongstab.worked_example import example_problem
from strongstab.rational import RationalFn

# third-order reference unit (coefficients rounded to two decimals), ascending
REFERENCE_UNIT = RationalFn([295.84, 21.45, 3.77, 0.068], [296.27, 187.25, 62.77, 9.93])


@pytest.fixture(scope="session")
def example():
    fact, W, zeros = example_problem()
    return fact, W, zeros


@pytest.fixture(scope="session")
def example_param_12(example):
    fact, W, zeros = example
    return nevpick.np_parametrization(nevpick.interp_data(W, fact, zeros, 1.2))


@pytest.fixture(scope="session")
def example_param_108(example):
    fact, W, zeros = example
    return nevpick.np_parametrization(nevpick.interp_data(W, fact, zeros, 1.08))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = {}


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line for an acceptance criterion."""
    key = request.node.name

    def record(number, text, ok):
        ACCEPTANCE_LINES[key] = (number, f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}")
        print(ACCEPTANCE_LINES[key][1])
        assert ok, text

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES.values()):
            terminalreporter.write_line(line)
