import numpy as np
import pytest

from nematiclab.initial_data import EtaVector, random_low_mode
from nematiclab.spectral import Grid, forward_transform


@pytest.fixture(scope="session")
def grid16():
    return Grid(3, 16)


@pytest.fixture(scope="session")
def grid32():
    return Grid(3, 32)


@pytest.fixture(scope="session")
def eta3():
    return EtaVector(np.array([0.0, 0.0, 1.0]))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def sin_x1(grid, ncomp=1, comp=0, scale=1.0):
    """sin(x_1) placed in component ``comp`` of an ``ncomp`` field."""
    x = grid.coordinates()
    vals = np.zeros((ncomp,) + grid.shape)
    vals[comp] = scale * np.sin(x[0])
    return forward_transform(vals, grid)


def random_field(grid, ncomp, rng):
    return forward_transform(rng.standard_normal((ncomp,) + grid.shape), grid)


def smooth_field(grid, ncomp, seed=0):
    return random_low_mode(grid, ncomp, np.random.default_rng(seed))


# -- acceptance summary ----------------------------------------------------------

ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance(capsys):
    """Record one PASS/FAIL line per acceptance criterion.

    The line is printed immediately (bypassing capture) and repeated in the
    terminal summary so it survives ``pytest -v`` output.
    """

    def record(number, title, passed, detail):
        line = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
