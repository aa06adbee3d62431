"""Shared pytest hooks.

The acceptance module exercises whole-pipeline behaviors; its per-test
verdicts are echoed as a one-line-per-check summary at the end of the run
so the results are readable without scrolling through the dot stream.
"""

_ACCEPTANCE: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if report.when == "call":
        _ACCEPTANCE.append((name, "PASS" if report.passed else "FAIL"))
    elif report.when == "setup" and not report.passed:
        # fixture failure or skip counts against the check itself
        _ACCEPTANCE.append((name, "FAIL"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance checks")
    for name, verdict in _ACCEPTANCE:
        label = name.removeprefix("test_").replace("_", " ")
        terminalreporter.write_line(f"{verdict}  {label}")
