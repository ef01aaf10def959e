import time

import numpy as np
import pytest

from fqc import gallery
from fqc.pointset import enumerate_points

_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def running():
    return gallery.running_example()


@pytest.fixture(scope="session")
def running_points(running):
    curve, L = running
    return enumerate_points(curve, L, [-20, 20, -20, 20])


@pytest.fixture(scope="session")
def product2():
    return gallery.product2_example()


@pytest.fixture
def rng():
    return np.random.default_rng(0x5EED)


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" in report.nodeid and report.when == "call":
        name = report.nodeid.split("::")[-1]
        _ACCEPTANCE[name] = (report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        outcome, duration = _ACCEPTANCE[name]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}  ({duration:.1f} s)")
