import numpy as np
import pytest

from bayes_stepdown.linalg import to_correlation

ACCEPTANCE_LINES = []


def random_correlation(rng, m, ridge=0.5):
    """Well-conditioned random correlation matrix."""
    a = rng.standard_normal((m, m + 2))
    return to_correlation(a @ a.T + ridge * m * np.eye(m))


def random_spd(rng, m):
    a = rng.standard_normal((m, m))
    return a @ a.T + m * np.eye(m)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def criterion():
    """Record one pass/fail summary line per acceptance criterion."""

    def record(label, passed, detail=""):
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
