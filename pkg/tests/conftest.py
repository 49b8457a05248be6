LABELS = {
    "1": "exhaustive property sweep (A1/A2/B1/B2)",
    "2": "feature table golden (m=5, n=10)",
    "3": "half-duplex discovery bound <= 1 frame",
    "4": "B2 invariant modulus discrepancy",
    "5": "frame-dependence detection",
    "6": "filtering energy ratio",
    "7": "determinism and p_rx=1 equivalence",
}

_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::", 1)[1]
        crit = name.split("_")[2] if name.startswith("test_criterion_") else name
        prev = _acceptance.get(crit, True)
        _acceptance[crit] = prev and report.outcome == "passed"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_acceptance):
        status = "PASS" if _acceptance[crit] else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {crit}: {LABELS.get(crit, '')}")
