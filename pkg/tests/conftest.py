import math
import sys

import numpy as np
import pytest
from hypothesis import settings

from floquet_qa.models import SchwingerRabiParams, build_schwinger_rabi
from floquet_qa.propagator import IntegratorConfig

settings.register_profile("default", deadline=None, max_examples=25, derandomize=True)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def cfg():
    return IntegratorConfig()


@pytest.fixture
def sr_ce1():
    return build_schwinger_rabi(SchwingerRabiParams(1.0, 0.1, 1.0))


def sr(omega0=1.0, theta=0.1, omega=1.0):
    return build_schwinger_rabi(SchwingerRabiParams(omega0, theta, omega))


PI = math.pi


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    RESULTS = getattr(mod, "RESULTS", [])
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for r in sorted(RESULTS, key=lambda r: r.number):
            terminalreporter.write_line(r.line())
