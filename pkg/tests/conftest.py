import numpy as np
import pytest

from jacfrac import JacobiBasis

# The four weight pairs used throughout the acceptance suite.
WEIGHTS = [(0.0, 0.0), (0.5, 0.5), (-0.5, 0.0), (0.3, 0.3)]


@pytest.fixture
def legendre01():
    return JacobiBasis.on(0.0, 1.0)


@pytest.fixture
def legendre11():
    return JacobiBasis.on(-1.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def bases_on(a, b):
    return [JacobiBasis.on(a, b, be, ga) for be, ga in WEIGHTS]


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS):
            terminalreporter.write_line(line)
