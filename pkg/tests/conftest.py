import re

_CRITERIA: dict[int, list[str]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    if report.when == "call" or report.outcome != "passed":
        _CRITERIA.setdefault(int(m.group(1)), []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        ok = all(o == "passed" for o in _CRITERIA[k])
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}")
