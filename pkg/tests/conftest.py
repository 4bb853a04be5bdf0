import pytest

ACCEPTANCE_LINES: list = []


@pytest.fixture
def acceptance_log():
    """Collects one ``criterion N: PASS|FAIL ...`` line per acceptance criterion."""

    def log(number: int, passed: bool, detail: str):
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return log


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
