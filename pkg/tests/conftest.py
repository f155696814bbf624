import numpy as np
import pytest

from detune_sim.models import LambdaParams, TwoLevelParams

ACCEPTANCE_LINES = []


@pytest.fixture
def fig5_params():
    return LambdaParams(N=1, g=1.0, Omega=10.0, Delta=100.0, delta=0.3)


@pytest.fixture
def fig2_params():
    def make(n):
        return TwoLevelParams(N=n, g=1.0, Delta=10.0, kappa=0.1, gamma=0.01)
    return make


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
