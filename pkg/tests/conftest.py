"""Shared fixtures: cached grids and representations.

Grids are expensive to build, so the commonly used resolutions are
constructed once per session and shared read-only across tests.
"""

import numpy as np
import pytest

from spinsplit.grid import make_grid
from spinsplit.reps import RepSpec, random_test_section

MASS = 1.3

# One line per acceptance criterion, echoed in the terminal summary so
# the verdicts are visible regardless of output capturing.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def grid_small_massive():
    return make_grid(4, 12, 24, 1.0, 2.0, radial_map="sinh",
                     mass_scale=MASS)


@pytest.fixture(scope="session")
def grid_mid_massive():
    return make_grid(6, 24, 48, 1.0, 2.0, radial_map="sinh",
                     mass_scale=MASS)


@pytest.fixture(scope="session")
def grid_small_massless():
    return make_grid(4, 12, 24, 1.0, 2.0)


@pytest.fixture(scope="session")
def grid_mid_massless():
    return make_grid(6, 24, 48, 1.0, 2.0)


@pytest.fixture(scope="session")
def rep_massive1():
    return RepSpec.massive(MASS, 1)


@pytest.fixture(scope="session")
def rep_massive0():
    return RepSpec.massive(MASS, 0)


@pytest.fixture(scope="session")
def rep_massless_plus():
    return RepSpec.massless(1)


def smooth_scalar(grid):
    """A smooth, pole-regular scalar test function on the grid."""
    st = np.sin(grid.theta)[None, :, None] + np.zeros(grid.shape)
    return np.exp(-((grid.kmag - 1.5) ** 2)) * st**2


def section(rep, grid, seed=3, **kw):
    return random_test_section(rep, grid, seed=seed, **kw)
