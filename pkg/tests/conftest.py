import time
from contextlib import contextmanager

import pytest

ACCEPTANCE_LINES: list[str] = []


@contextmanager
def criterion(number: int, title: str, limit: float):
    """Time a criterion, record one pass/fail line, and enforce the runtime limit."""
    info: dict = {}
    t0 = time.perf_counter()
    try:
        yield info
    except BaseException as exc:
        dt = time.perf_counter() - t0
        line = f"criterion {number:2d} FAIL  {title} ({dt:.2f} s): {type(exc).__name__}: {exc}".splitlines()[0]
        ACCEPTANCE_LINES.append(line)
        print(line)
        raise
    dt = time.perf_counter() - t0
    ok = dt < limit
    detail = info.get("detail", "")
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title} ({dt:.2f} s < {limit:g} s){': ' + detail if detail else ''}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, f"runtime {dt:.2f} s exceeds {limit} s"


@pytest.fixture
def acceptance():
    return criterion


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
