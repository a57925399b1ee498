import re

_ACCEPTANCE_RESULTS = {}


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid or report.when != "call":
        return
    match = re.search(r"test_c(\d+)_(\w+)", report.nodeid)
    if match:
        number = int(match.group(1))
        label = match.group(2).replace("_", " ")
        _ACCEPTANCE_RESULTS[number] = (label, report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number in sorted(_ACCEPTANCE_RESULTS):
        label, outcome = _ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(
            f"criterion {number:2d} [{outcome.upper():>6}] {label}")
