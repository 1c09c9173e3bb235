import random

import pytest

from bpmatch.backends import BgnBackend, PaillierBackend


@pytest.fixture(scope="session")
def bgn16():
    return BgnBackend.generate(16, random.Random(1016))


@pytest.fixture(scope="session")
def bgn24_pair():
    rng = random.Random(1024)
    return BgnBackend.generate(24, rng), BgnBackend.generate(24, rng)


@pytest.fixture(scope="session")
def paillier_pair():
    rng = random.Random(2016)
    return PaillierBackend.generate(16, rng), PaillierBackend.generate(16, rng)


_criteria = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or report.failed or report.skipped:
        prev = _criteria.get(props["criterion"])
        outcome = "FAIL" if report.failed else ("SKIP" if report.skipped else "PASS")
        if prev is None or prev[0] == "PASS":
            _criteria[props["criterion"]] = (outcome, props.get("detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda k: int(k[2:])):
        outcome, detail = _criteria[name]
        terminalreporter.write_line(f"{name} {outcome}  {detail}")
