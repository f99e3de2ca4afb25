import pytest

_VERDICTS = []


@pytest.fixture
def verdict():
    """Record one acceptance line; the summary prints them in order."""

    def record(number, ok, detail):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        _VERDICTS.append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance")
    for _, line in sorted(_VERDICTS):
        terminalreporter.write_line(line)
