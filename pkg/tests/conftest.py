import numpy as np
import pytest

from noma_lab import build_lattice, coset_leaders


@pytest.fixture(scope="session")
def lat5():
    return build_lattice(5)


@pytest.fixture(scope="session")
def lat7():
    return build_lattice(7)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def leaders(lattice, m1, m2):
    return coset_leaders(lattice, m1), coset_leaders(lattice, m2)


def as_row_set(points, decimals=9):
    """Rounded rows as a sorted list, for set-equality checks."""
    return sorted(map(tuple, np.round(np.asarray(points), decimals)))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
