import numpy as np
import pytest

from orthokin import canonical_design


@pytest.fixture
def canon():
    return canonical_design(1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def ball_points(rng, n, radius):
    """Uniform samples in a ball centred at the origin."""
    d = rng.normal(size=(n, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return d * radius * rng.uniform(size=(n, 1)) ** (1 / 3)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
