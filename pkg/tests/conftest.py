import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or mod._results.cache_info().currsize == 0:
        return
    terminalreporter.section("acceptance criteria")
    for res in mod._results():
        terminalreporter.write_line(res.line())
