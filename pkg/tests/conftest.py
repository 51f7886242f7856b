from __future__ import annotations

import pytest

_RESULTS: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or rep.failed:
        n, title = mark.args
        entry = _RESULTS.setdefault(n, {"title": title, "passed": 0, "failed": 0})
        entry["passed" if rep.passed else "failed"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        r = _RESULTS[n]
        verdict = "PASS" if r["failed"] == 0 else "FAIL"
        total = r["passed"] + r["failed"]
        terminalreporter.write_line(f"criterion {n} [{verdict}] {r['title']} ({r['passed']}/{total} tests)")
