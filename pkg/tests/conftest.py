import pytest
from hypothesis import settings, strategies as st

from addcoal.model import EXPONENTIAL, RANK, fixture
from addcoal.samplers import Seed, sample_instance

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def instances(draw, max_n=14, mode=RANK):
    """Small random (tree, schedule) pairs, reproducible from the drawn seed."""
    n = draw(st.integers(1, max_n))
    master = draw(st.integers(0, 2**32 - 1))
    return sample_instance(n, mode, Seed(master))


rank_instances = instances()
exp_instances = instances(mode=EXPONENTIAL)


@pytest.fixture(params=["P3", "C3", "P4"])
def small_fixture(request):
    return request.param, fixture(request.param)


# one line per acceptance criterion, shown after the test run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k[1:])):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
