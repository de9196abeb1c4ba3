import pytest

from qcgle.ansatz_a import solve_case_a
from qcgle.ansatz_b import solve_case_b
from qcgle.params import QcgleParams
from qcgle.solution import SolutionProfile

# Acceptance lines collected by test_acceptance.py, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


PERIODIC_SET = dict(epsilon=-1.0, h1=-1.0, h3=-2.0, h5=0.375, c1=-1.0, c3=-1.0, c5=0.125)
TRAVELING_SET = dict(epsilon=1.0, h1=1.0, h3=-1.0, h5=-1.0, c1=-0.75, c3=1.0, c5=-2.5)
KINK_F0 = 7.0 / 32.0
SPIKY_F0 = 6.0


@pytest.fixture
def periodic_params():
    return QcgleParams(**PERIODIC_SET)


@pytest.fixture
def traveling_params():
    return QcgleParams(**TRAVELING_SET)


@pytest.fixture
def periodic_result(periodic_params):
    return solve_case_a(periodic_params)[0]


@pytest.fixture
def periodic_profile(periodic_result):
    return SolutionProfile.from_case_a(periodic_result, 4.0)


@pytest.fixture
def traveling_result(traveling_params):
    return solve_case_b(traveling_params, sign_c=1, sign_b1=1)


@pytest.fixture
def kink_profile(traveling_result):
    return SolutionProfile.from_case_b(traveling_result, KINK_F0)


@pytest.fixture
def spiky_profile(traveling_params):
    # (+c, -b1) is the orientation consistent with F0 above the double root
    return SolutionProfile.from_case_b(solve_case_b(traveling_params, 1, -1), SPIKY_F0)
