import pytest

_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance line and assert it."""

    def check(number, title, passed, detail):
        _LINES.append(f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}")
        assert passed, detail

    return check


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
