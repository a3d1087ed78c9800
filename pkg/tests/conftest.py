import numpy as np
import pytest

from askm import normalize_system

ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[num])


@pytest.fixture
def random_system():
    def make(m, n, seed=0, feasible=True):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((m, n))
        if feasible:
            b = A @ rng.standard_normal(n) + rng.uniform(0, 0.1, m)
        else:
            b = rng.standard_normal(m)
        return normalize_system(A, b)
    return make
