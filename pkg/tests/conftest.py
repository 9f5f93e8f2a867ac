import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

try:
    import highspy  # noqa: F401

    HAVE_HIGHS = True
except ImportError:
    HAVE_HIGHS = False

ACCEPTANCE_LINES: list[str] = []


def pytest_collection_modifyitems(config, items):
    if HAVE_HIGHS:
        return
    skip = pytest.mark.skip(reason="highspy not installed; external MILP checks skipped")
    for item in items:
        if "external" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_matrix(rng, n, m, binary=False):
    if binary:
        return (rng.random((n, m)) < 0.5).astype(float)
    return rng.random((n, m))
