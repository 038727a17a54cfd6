import numpy as np
import pytest
from hypothesis import settings

from lpchar import MeasureSpace, StepFunction

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def half():
    return MeasureSpace([0.5, 0.5])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def fn(space, values):
    return StepFunction(space, values)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
