"""Collects the acceptance verdicts and prints one line per criterion at the end."""

import pytest

VERDICTS = {}


def pytest_runtest_makereport(item, call):
    crit = item.get_closest_marker("criterion")
    if crit is None or call.when != "call":
        return
    number, label = crit.args
    ok = call.excinfo is None
    VERDICTS[number] = (label, ok)


@pytest.hookimpl(trylast=True)
def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(VERDICTS):
        label, ok = VERDICTS[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number}: {label}")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, label): acceptance criterion")
    config.addinivalue_line("markers", "slow: long Monte Carlo runs")
