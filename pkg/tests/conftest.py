"""Acceptance bookkeeping: one PASS/FAIL line per criterion in the terminal summary."""
from collections import OrderedDict

_results = OrderedDict()


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    key, clause = crit
    _results.setdefault(key, []).append((clause, report.outcome))


def pytest_runtest_setup(item):
    mark = item.get_closest_marker("acceptance")
    if mark is not None:
        item.user_properties.append(("criterion", (mark.args[0], mark.args[1])))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(_results, key=lambda k: (int(k.split(".")[0]), k)):
        clauses = _results[key]
        ok = all(outcome == "passed" for _, outcome in clauses)
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key}")
        for clause, outcome in clauses:
            tr.write_line(f"        {outcome.upper():7s} {clause}")
