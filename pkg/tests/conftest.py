import pytest
from hypothesis import settings

from tanlin.ode_form import Form8Coefficients

settings.register_profile("ci", deadline=None, derandomize=True, print_blob=True)
settings.load_profile("ci")

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}

EXAMPLE1_TEXT = "x*y*y4 + (4*x*p + 3*y)*y3 + 3*x*y2^2 + 9*p*y2 = 0"
EXAMPLE2_TEXT = "y^3*y4 - 4*y^2*p*y3 - 3*y^2*y2^2 + 12*y*p^2*y2 - 6*p^4 = 0"


@pytest.fixture
def example1() -> Form8Coefficients:
    return Form8Coefficients.from_values(A0="(4*p*x + 3*y)/(x*y)", B2="3/y", B1="9*p/(x*y)")


@pytest.fixture
def example2() -> Form8Coefficients:
    return Form8Coefficients.from_values(A0="-4*p/y", B2="-3/y", B1="12*p^2/y^2", B0="-6*p^4/y^3")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
