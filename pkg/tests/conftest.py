import sys

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_instance(rng, n, alpha=None):
    """Interior w and lower bounds beta = alpha * (interior simplex point)."""
    w = rng.dirichlet(np.ones(n))
    if alpha is None:
        alpha = rng.uniform(0.01, 0.99)
    beta = alpha * rng.dirichlet(np.ones(n))
    return w, beta


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("[")[1].split("]")[0])):
            terminalreporter.write_line(line)
