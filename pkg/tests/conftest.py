import time

import pytest

_ACCEPTANCE = []


class Criterion:
    """Times one acceptance criterion and records its verdict."""

    def __init__(self, number, title, budget):
        self.number, self.title, self.budget = number, title, budget
        self.detail = ""

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        ok = exc_type is None and elapsed < self.budget
        if exc_type is None and not ok:
            self.detail = f"over budget ({elapsed:.2f} s >= {self.budget} s)"
        elif exc_type is not None:
            self.detail = f"{exc_type.__name__}: {exc}".splitlines()[0]
        line = (f"criterion {self.number:2d} {'PASS' if ok else 'FAIL'} "
                f"{elapsed:7.2f} s  {self.title}" + (f"  [{self.detail}]" if self.detail else ""))
        _ACCEPTANCE.append((self.number, line))
        print(line)
        if exc_type is None and not ok:
            pytest.fail(self.detail)
        return False


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE):
        terminalreporter.write_line(line)
