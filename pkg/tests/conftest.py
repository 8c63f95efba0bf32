import math

import pytest

TWO_PI = 2 * math.pi


@pytest.fixture
def table():
    """Reference device parameters in rad/ns."""
    return {
        "N": 10,
        "omega_R": TWO_PI * 7.0,
        "omega_T": TWO_PI * 5.0,
        "g": TWO_PI * 0.2,
        "A": TWO_PI * 0.16,
    }


_CRITERIA = []


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    props = dict(report.user_properties)
    if "criterion" in props:
        _CRITERIA.append((props["criterion"], report.passed, props.get("measured", "")))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, measured in sorted(_CRITERIA, key=lambda c: c[0]):
        line = f"{'PASS' if passed else 'FAIL'}  {name}"
        terminalreporter.write_line(f"{line}  [{measured}]" if measured else line)
