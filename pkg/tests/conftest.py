import pytest

ACCEPTANCE_LINES: list = []


@pytest.fixture
def record_criterion():
    def record(number: int, title: str, passed: bool, elapsed: float, budget: float, detail: str = ""):
        status = "PASS" if passed else "FAIL"
        line = f"criterion {number} [{status}] {title}: {elapsed:.2f}s (budget {budget:g}s)"
        if detail:
            line += f" {detail}"
        ACCEPTANCE_LINES.append((number, line))
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
