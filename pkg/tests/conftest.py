import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_criteria = {}
_node_criterion = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion the test belongs to")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            n, title = mark.args
            _criteria.setdefault(n, {"title": title, "outcomes": []})
            _node_criterion[item.nodeid] = n


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    n = _node_criterion.get(report.nodeid)
    if n is not None:
        _criteria[n]["outcomes"].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        out = _criteria[n]["outcomes"]
        if not out:
            terminalreporter.write_line(f"NOT RUN criterion {n}: {_criteria[n]['title']}")
            continue
        ok = "failed" not in out and "passed" in out
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {_criteria[n]['title']}"
                                    f" ({out.count('passed')} passed, {out.count('failed')} failed,"
                                    f" {out.count('skipped')} skipped)")
