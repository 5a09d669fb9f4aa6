import time

_T0 = None


def pytest_sessionstart(session):
    global _T0
    _T0 = time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _T0 is not None:
        terminalreporter.write_line(
            f"suite wall time: {time.perf_counter() - _T0:.1f}s (budget 60s)")
