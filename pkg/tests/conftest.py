import numpy as np
import pytest

from discrete_inclusions import (
    AsymptoticBound,
    InclusionProblem,
    PiecewiseNonlinearity,
    SpdMatrix,
    truncated_power,
)

# lines appended by the acceptance tests, echoed once at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def h():
    """t**2 on (-1, 1), zero outside; G saturates at +-1/3."""
    return truncated_power(2, 1.0, AsymptoticBound(c=0.0, radius=1.0, linear=0.0))


@pytest.fixture
def two_step():
    """0 below 0, 1 on (0, 2), 3 above 2."""
    return PiecewiseNonlinearity((0.0, 2.0), ((0.0,), (1.0,), (3.0,)))


@pytest.fixture
def scalar_problem(h):
    return InclusionProblem(SpdMatrix([[2.0]]), [h], 4.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
