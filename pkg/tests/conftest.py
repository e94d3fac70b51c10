import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from elastocald.material import Material

settings.register_profile("default", deadline=None, max_examples=50,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


@pytest.fixture
def standard():
    """lambda = 2, mu = 1, mu_tilde = 1, rho = 1, omega = 2."""
    return Material(2.0, 1.0, 1.0, 1.0, 2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def acceptance():
    """Record one pass/fail line for an acceptance criterion."""
    def report(number, title, passed, detail):
        line = f"criterion {number:2d} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        return passed
    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
