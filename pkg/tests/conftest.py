import time
from contextlib import contextmanager

import pytest


class AcceptanceLog:
    def __init__(self):
        self.lines = {}

    @contextmanager
    def criterion(self, number: int, title: str, limit_s: float):
        """Time a block; the block sets ``c.ok`` and ``c.detail``; runtime must beat ``limit_s``."""
        c = _Result()
        start = time.perf_counter()
        try:
            yield c
        finally:
            c.runtime = time.perf_counter() - start
            within = c.runtime < limit_s
            status = "PASS" if (c.ok and within) else "FAIL"
            self.lines[number] = (f"[{status}] criterion {number:2d}: {title}: {c.detail} "
                                  f"({c.runtime:.2f} s, limit {limit_s:g} s)")
        assert c.ok, c.detail
        assert within, f"runtime {c.runtime:.2f} s exceeds {limit_s} s"


class _Result:
    ok = False
    detail = "not evaluated"
    runtime = 0.0


def pytest_configure(config):
    config._acceptance_log = AcceptanceLog()


@pytest.fixture(scope="session")
def acceptance(request):
    return request.config._acceptance_log


def pytest_terminal_summary(terminalreporter, config):
    log = getattr(config, "_acceptance_log", None)
    if log is None or not log.lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(log.lines):
        terminalreporter.write_line(log.lines[n])
