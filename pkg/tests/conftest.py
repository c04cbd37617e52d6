import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from gibbsfree.functions import fourier_coeffs_exact, function_h, jump_set_of

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def h():
    return function_h()


@pytest.fixture(scope="session")
def h_jumps(h):
    return jump_set_of(h)


@pytest.fixture(scope="session")
def h50(h):
    return fourier_coeffs_exact(h, 50)


@pytest.fixture(autouse=True)
def _quiet_numerics():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(LINES, key=int):
            terminalreporter.write_line(LINES[key])
