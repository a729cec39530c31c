from __future__ import annotations

import sys
from collections import defaultdict
from pathlib import Path

import pytest
from hypothesis import settings

from halfblind import fixtures
from halfblind.belief import close_belief_monoid, decide

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None)
settings.load_profile("default")

_criteria: dict[int, str] = {}
_outcomes: dict[int, list[str]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    _criteria[number] = title
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes[number].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        results = _outcomes[number]
        ok = results and all(r == "passed" for r in results)
        verdict = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}  {_criteria[number]}")


@pytest.fixture(scope="session")
def games():
    return {name: fixtures.load(name) for name in fixtures.NAMES}


@pytest.fixture(scope="session")
def closures(games):
    return {name: close_belief_monoid(g) for name, g in games.items()}


@pytest.fixture(scope="session")
def verdicts(games):
    return {name: decide(g) for name, g in games.items()}
