import numpy as np
import pytest

from stabdistill.states import BdsState

WORKED_STATE = [0.055] * 9
WORKED_STATE[5] = 0.56  # k-fastest position of (k, l) = (2, 1)


@pytest.fixture
def worked_state():
    return BdsState.from_list(WORKED_STATE, 3)


def random_bds(d, rng):
    return BdsState(d, rng.dirichlet(np.ones(d * d)).reshape(d, d))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
