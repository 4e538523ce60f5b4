import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from awq.askey_wilson import CANONICAL
from awq.quadrature import QuadratureRule

settings.register_profile(
    "awq", deadline=None, max_examples=30, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("awq")


@pytest.fixture(scope="session")
def canonical():
    return CANONICAL


@pytest.fixture(scope="session")
def rule512():
    return QuadratureRule(512)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
