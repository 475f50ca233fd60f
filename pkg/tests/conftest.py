import time

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

SUITE_BUDGET_S = 120.0

# filled by tests/test_acceptance.py, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# X column 2 carries the sign that makes it orthonormal; see README
EX1 = (np.array([[1.0], [0.0]]), np.array([[0.5], [np.sqrt(3) / 2]]))
EX2 = (
    np.array([[-np.sqrt(2) / 2, -np.sqrt(2) / 4], [np.sqrt(2) / 2, -np.sqrt(2) / 4], [0.0, np.sqrt(3) / 2]]),
    np.array([[0.0, np.sqrt(2) / 2], [1.0, 0.0], [0.0, np.sqrt(2) / 2]]),
)


def pytest_sessionstart(session):
    session.config._grass_t0 = time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    elapsed = time.perf_counter() - config._grass_t0
    if not ACCEPTANCE_LINES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
        tr.write_line(line)
    ok = elapsed <= SUITE_BUDGET_S
    tr.write_line(f"{'PASS' if ok else 'FAIL'} criterion 14: suite wall time {elapsed:.1f} s (budget {SUITE_BUDGET_S:.0f} s)")
