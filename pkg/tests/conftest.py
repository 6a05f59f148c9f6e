import time

import pytest

_RESULTS: dict[int, tuple[bool, str]] = {}


class Criterion:
    """Times one acceptance criterion and records a pass/fail line."""

    def __init__(self, number: int, title: str, limit: float):
        self.number, self.title, self.limit = number, title, limit
        self.notes: list[str] = []

    def note(self, text: str):
        self.notes.append(text)

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        ok = exc_type is None and elapsed < self.limit
        detail = "; ".join(self.notes + [f"{elapsed:.1f}s of {self.limit:.0f}s"])
        if exc_type is not None:
            detail = f"{exc_type.__name__}: {exc}; " + detail
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {self.number}: {self.title} ({detail})"
        _RESULTS[self.number] = (ok, line)
        print(line)
        if exc_type is None and not ok:
            raise AssertionError(f"criterion {self.number} exceeded its runtime limit: {elapsed:.1f}s")
        return False


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        terminalreporter.write_line(_RESULTS[n][1])
