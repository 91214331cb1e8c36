import numpy as np
import pytest

from sbmcount.graph import from_edges
from sbmcount.kernels import BACKENDS


def random_multigraph(rng, n, m, loops=True):
    u = rng.integers(0, n, m)
    v = rng.integers(0, n, m)
    if not loops:
        keep = u != v
        u, v = u[keep], v[keep]
    return from_edges(n, u, v)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    return request.param


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    def add(line: str) -> None:
        ACCEPTANCE_LINES.append(line)
        print(line)

    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
