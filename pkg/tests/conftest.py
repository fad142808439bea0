import numpy as np
import pytest

from anharm_om.morse import MorseParams, position_matrix
from anharm_om.optics import HybridParams, SingleModeParams, make_spectrum
from anharm_om.rates import BathConfig

# one line per acceptance criterion, filled by tests/test_acceptance.py
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture(scope="session")
def hybrid_spec():
    return make_spectrum(HybridParams())


@pytest.fixture(scope="session")
def single_spec():
    return make_spectrum(SingleModeParams(550.0, 60.0))


@pytest.fixture
def bath():
    return BathConfig(0.05, 0.05)


def harmonic_X(K):
    return position_matrix(MorseParams(20.0, 0.0, max_levels=K), K)


def thermal_populations(n_th, K):
    r = n_th / (1 + n_th)
    p = r ** np.arange(K)
    return p / p.sum()
