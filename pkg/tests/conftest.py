import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from vacwave.approx_wave import WaveParams
from vacwave.exact_wave import FarField

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def ff():
    """Shallow-water far field: gamma=2, alpha=1, rho+=1, u+=0."""
    return FarField()


@pytest.fixture
def wp(ff):
    return WaveParams.for_far_field(ff, nu=1e-2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
