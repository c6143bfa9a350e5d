import time

import pytest

from collapsim import multi_particle
from collapsim.diffusion import DiffusionParams, simulate

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: dict = {}

# Monte Carlo runs shared between unit and acceptance tests, with the wall
# time each took to compute
_RUNS: dict = {}
RUN_SECONDS: dict = {}


def born_seed(x0: float) -> int:
    return 1000 + int(round(x0 * 100))


def _cached(key, fn):
    if key not in _RUNS:
        t0 = time.perf_counter()
        _RUNS[key] = fn()
        RUN_SECONDS[key] = time.perf_counter() - t0
    return _RUNS[key]


def two_atom_run(x0: float, n: int, seed: int, intensity: float = 1.0):
    key = ("two", x0, n, seed, intensity)
    return _cached(key, lambda: simulate(x0, n, DiffusionParams(intensity=intensity), seed))


def three_atom_run(x1: float, x2: float, n: int, seed: int):
    key = ("three", x1, x2, n, seed)
    return _cached(key, lambda: multi_particle.simulate_pairs(x1, x2, n, DiffusionParams(), seed))


@pytest.fixture(scope="session")
def mc_two_atom():
    return two_atom_run


@pytest.fixture(scope="session")
def mc_three_atom():
    return three_atom_run


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k[1:])):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
