import sys

import pytest
from hypothesis import settings

from morsewig import morse, states

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture(scope="session")
def sys10():
    return morse.make_system(10)


@pytest.fixture(scope="session")
def docs_quarter(sys10):
    return states.docs(sys10, states.solve_zeta_for_mean(sys10, 0.25))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in mod.REPORT:
            terminalreporter.write_line(line)
