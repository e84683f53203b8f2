"""Acceptance bookkeeping: one PASS/FAIL line per criterion after the run."""

import pytest

_outcomes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            _outcomes.setdefault(mark.args[0], [mark.args[1], None])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    entry = _outcomes.setdefault(mark.args[0], [mark.args[1], None])
    if report.failed:
        entry[1] = False
    elif report.when == "call" and entry[1] is None:
        entry[1] = report.passed


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        title, passed = _outcomes[number]
        status = {True: "PASS", False: "FAIL", None: "NOT RUN"}[passed]
        terminalreporter.write_line(f"AC{number:02d} {status}  {title}")
