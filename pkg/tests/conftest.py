"""Shared fixtures: the acceptance suite records one summary line per
criterion; they are echoed in a dedicated section after the run."""

import pytest

_criterion_lines = []


@pytest.fixture
def criterion():
    """Record and assert a single acceptance-criterion verdict."""

    def _check(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:02d}: {'PASS' if ok else 'FAIL'} - {detail}"
        _criterion_lines.append(line)
        print(line, flush=True)
        assert ok, line

    return _check


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_criterion_lines):
            terminalreporter.write_line(line)
