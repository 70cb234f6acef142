import pytest

_ACCEPTANCE = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    entry = _ACCEPTANCE.setdefault((number, item.nodeid), [title, "PASS"])
    if call.excinfo is not None and not call.excinfo.errisinstance(pytest.skip.Exception):
        entry[1] = "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (number, _), (title, status) in sorted(_ACCEPTANCE.items()):
        terminalreporter.write_line(f"[{status}] AC{number}: {title}")
