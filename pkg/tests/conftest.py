import pytest

_LINES = pytest.StashKey[list]()


@pytest.fixture
def report(request):
    """Print and record one acceptance line: ``report(n, passed, detail)``."""
    lines = request.config.stash.setdefault(_LINES, [])

    def emit(number, passed, detail):
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(line)
        lines.append(line)
        return passed

    return emit


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
