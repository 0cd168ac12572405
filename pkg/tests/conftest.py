import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

CRITERIA: dict[int, bool] = {}


def record(n: int, ok: bool) -> bool:
    CRITERIA[n] = bool(ok)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance")
    for n in sorted(CRITERIA):
        terminalreporter.write_line(f"criterion {n}: {'pass' if CRITERIA[n] else 'FAIL'}")
