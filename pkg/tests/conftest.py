import warnings

import numpy as np
import pytest

from kgs_spectral.assembly import build_operators
from kgs_spectral.basis import DomainMap

# filled by tests/test_acceptance.py, printed after the run
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture(scope="session")
def ref_ops():
    """Small operator set on the reference interval."""
    return build_operators(12, DomainMap(-1.0, 1.0), 1.5)


@pytest.fixture(scope="session")
def ops_factory():
    cache = {}

    def make(N, alpha, a=-20.0, b=20.0):
        key = (N, alpha, a, b)
        if key not in cache:
            cache[key] = build_operators(N, DomainMap(a, b), alpha)
        return cache[key]

    return make


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(autouse=True)
def _complex_casts_are_errors():
    with warnings.catch_warnings():
        warnings.simplefilter("error", category=np.exceptions.ComplexWarning)
        yield
