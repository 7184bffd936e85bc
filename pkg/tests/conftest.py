import re
from collections import defaultdict

CRITERIA = {
    1: "PBH verdict agrees with S_n = {0}",
    2: "iterated-intersection gain correctness",
    3: "geometric step equals Luenberger step",
    4: "nonlinear deadbeat traces",
    5: "dilation equivariance",
    6: "win-rate bands",
    7: "serial and parallel reports identical",
    8: "property suites",
}

_results = defaultdict(list)


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_", report.nodeid)
    if not m:
        return
    if report.when == "call" or report.outcome == "failed":
        name = report.nodeid.split("::", 1)[1]
        _results[int(m.group(1))].append((name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        failed = [name for name, outcome in _results[n] if outcome == "failed"]
        status = "FAIL" if failed else "PASS"
        line = f"criterion {n}: {status}  {CRITERIA.get(n, '')}"
        if failed:
            line += "  (failed: " + ", ".join(failed) + ")"
        terminalreporter.write_line(line)
