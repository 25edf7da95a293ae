import numpy as np
import pytest
from hypothesis import settings

from twirling.lie_core import su2_spin, suN_defining, torus_charges, u1_charges

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


def all_reps():
    return [
        su2_spin(0.5),
        su2_spin(1),
        suN_defining(3),
        u1_charges([0, 1, 3]),
        torus_charges([[1, 0, 2], [0, 1, -1]]),
    ]


@pytest.fixture(params=all_reps(), ids=lambda r: r.family_tag + str(r.dim_hilbert))
def rep(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


# ---------------------------------------------------------------------------
# Acceptance summary: one PASS/FAIL line per criterion in the terminal report

ACCEPTANCE_DETAILS: dict = {}
_acceptance_outcomes: dict = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance_outcomes[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance_outcomes):
        number = int(name.split("_")[2])
        verdict = "PASS" if _acceptance_outcomes[name] == "passed" else "FAIL"
        detail = ACCEPTANCE_DETAILS.get(number, "")
        terminalreporter.write_line(f"criterion {number:2d} {verdict}: {detail}")
