import pytest

_criteria = {}


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        label = _criteria.get(report.nodeid)
        if label is not None:
            _criteria[report.nodeid] = (label, report.outcome.upper())


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            _criteria[item.nodeid] = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    ran = [v for v in _criteria.values() if isinstance(v, tuple)]
    if not ran:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in ran:
        mark = "PASS" if outcome == "PASSED" else "FAIL"
        terminalreporter.write_line(f"[{mark}] {label}")
