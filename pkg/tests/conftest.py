"""Prints one PASS/FAIL line per acceptance criterion at the end of the run."""

_CRITERIA = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return
    detail = dict(report.user_properties).get("detail", "")
    _CRITERIA[name] = (report.outcome, detail, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda n: int(n.split("_")[2])):
        outcome, detail, secs = _CRITERIA[name]
        tag = "PASS" if outcome == "passed" else "FAIL"
        label = name[len("test_criterion_"):].replace("_", " ", 1)
        terminalreporter.write_line(f"{tag}  criterion {label}  ({secs:.1f} s)  {detail}")
