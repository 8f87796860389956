"""Acceptance reporting: one PASS/FAIL line per criterion at the end of the run."""

from __future__ import annotations

import pytest

_results: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _results.setdefault(number, {"title": title, "passed": True, "ran": False, "details": []})
    if report.when == "call":
        entry["ran"] = True
        entry["details"].extend(v for k, v in item.user_properties if k == "detail")
    if report.failed:
        entry["passed"] = False


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        entry = _results[number]
        status = "PASS" if entry["passed"] and entry["ran"] else "FAIL"
        details = "; ".join(entry["details"])
        line = f"{status} criterion {number}: {entry['title']}"
        terminalreporter.write_line(line + (f" ({details})" if details else ""))
