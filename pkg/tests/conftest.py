import os
import re

import pytest

from catopt.problemfile import load_problem

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SCENARIOS = os.path.join(ROOT, "scenarios")

_criteria: dict[int, list[str]] = {}


@pytest.fixture
def scenario_path():
    return lambda k: os.path.join(SCENARIOS, f"scenario{k}.prob")


@pytest.fixture
def scenario1():
    return load_problem(os.path.join(SCENARIOS, "scenario1.prob"))


@pytest.fixture
def scenario2():
    return load_problem(os.path.join(SCENARIOS, "scenario2.prob"))


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria.setdefault(int(m.group(1)), []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_criteria):
        ok = all(o == "passed" for o in _criteria[k])
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}")
