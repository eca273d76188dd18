import numpy as np
import pytest

from wavekin.grid import SpectralField, build_grid, to_coefficients


def random_coeffs(grid, seed=0):
    """Coefficients of a seeded random real field."""
    rng = np.random.default_rng(seed)
    return to_coefficients(SpectralField(grid, rng.standard_normal(grid.shape)))


def direct_dft(values, grid):
    """Literal sum ``1/N^d sum_i f_i exp(-i pi/L j.k_i)`` over all modes."""
    K = np.stack([k.ravel() for k in grid.mesh()], axis=1)
    J = np.stack([m.ravel() for m in grid.mode_mesh()], axis=1)
    E = np.exp(-1j * np.pi / grid.L * (J @ K.T))
    return (E @ values.ravel().astype(complex)).reshape(grid.shape) / grid.N**grid.d


@pytest.fixture
def grid2():
    return build_grid(2, 8, 1.0)


@pytest.fixture
def grid3():
    return build_grid(3, 4, 1.0)


# acceptance verdicts, echoed in the terminal summary so they survive output capture
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
