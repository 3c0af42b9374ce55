"""Prints one PASS/FAIL line per acceptance criterion at the end of the run."""
import re

_results = {}


def pytest_runtest_logreport(report):
    match = re.search(r"test_criterion_(\d+)_(\w+)", report.nodeid)
    if not match:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        key = int(match.group(1))
        detail = dict(report.user_properties).get("detail", "")
        _results[key] = (match.group(2).replace("_", " "), report.outcome, detail)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_results):
        name, outcome, detail = _results[key]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        line = f"criterion {key:2d} {verdict}: {name}"
        terminalreporter.write_line(line + (f" ({detail})" if detail else ""))
