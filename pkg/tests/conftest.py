import math

import pytest
from hypothesis import settings

from pucci_eig.pucci_core import EllipticityPair

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

SQRT2 = math.sqrt(2.0)


@pytest.fixture
def ell12():
    return EllipticityPair(1.0, 2.0)


# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
