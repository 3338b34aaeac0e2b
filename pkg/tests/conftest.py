import time

import pytest


def pytest_addoption(parser):
    parser.addoption("--huge", action="store_true", default=False, help="run n = 5 exhaustive enumerations")


@pytest.fixture
def huge(request):
    return request.config.getoption("--huge")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--huge"):
        return
    skip = pytest.mark.skip(reason="needs --huge")
    for item in items:
        if "huge" in item.keywords:
            item.add_marker(skip)


def pytest_configure(config):
    config.addinivalue_line("markers", "huge: exhaustive runs at n = 5 (opt-in via --huge)")


_CRITERIA: list[str] = []


class _Criterion:
    """Times one acceptance criterion and records a PASS/FAIL line."""

    def __init__(self, label: str, limit_s: float):
        self.label = label
        self.limit_s = limit_s
        self.notes: list[str] = []

    def note(self, text: str) -> None:
        self.notes.append(text)

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        over = elapsed > self.limit_s
        ok = exc_type is None and not over
        detail = "; ".join(self.notes)
        if over:
            detail = f"{detail}; over the {self.limit_s:.0f}s limit" if detail else f"over the {self.limit_s:.0f}s limit"
        if exc_type is not None:
            detail = f"{detail}; {exc_type.__name__}: {exc}" if detail else f"{exc_type.__name__}: {exc}"
        _CRITERIA.append(f"{'PASS' if ok else 'FAIL'} {self.label} ({elapsed:.1f}s) {detail}".rstrip())
        if over and exc_type is None:
            raise AssertionError(f"{self.label} took {elapsed:.1f}s, limit {self.limit_s:.0f}s")
        return False


@pytest.fixture
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
