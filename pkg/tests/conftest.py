import contextlib
import time

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def criterion(request):
    lines = request.config._acceptance_lines

    @contextlib.contextmanager
    def record(number, title):
        start = time.perf_counter()
        status = "FAIL"
        try:
            yield
            status = "PASS"
        finally:
            line = f"{status} criterion {number}: {title} ({time.perf_counter() - start:.1f}s)"
            lines.append(line)
            print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
