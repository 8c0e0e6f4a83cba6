"""Per-criterion pass/fail report for the acceptance suite.

Tests marked ``@pytest.mark.criterion(n, title)`` are tallied and printed
as one line each at the end of the run, together with any measurements
they recorded through the ``note`` fixture.
"""

import pytest

_CRITERIA = {}
_OUTCOMES = {}
_NOTES = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            _CRITERIA[item.nodeid] = mark.args


def pytest_runtest_logreport(report):
    if report.nodeid not in _CRITERIA:
        return
    if report.failed:
        _OUTCOMES[report.nodeid] = "FAIL"
    elif report.when == "call" and report.nodeid not in _OUTCOMES:
        _OUTCOMES[report.nodeid] = "SKIP" if report.skipped else "PASS"


@pytest.fixture
def note(request):
    """Record a measurement shown next to the criterion's pass/fail line."""
    lines = _NOTES.setdefault(request.node.nodeid, [])
    return lines.append


def pytest_terminal_summary(terminalreporter):
    ran = [(args, nodeid) for nodeid, args in _CRITERIA.items() if nodeid in _OUTCOMES]
    if not ran:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for (number, title), nodeid in sorted(ran):
        tr.write_line(f"criterion {number}: {_OUTCOMES[nodeid]}  {title}")
        for line in _NOTES.get(nodeid, []):
            tr.write_line(f"    {line}")
