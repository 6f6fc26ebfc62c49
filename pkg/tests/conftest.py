import pytest

# (criterion, passed, detail) rows filled in by test_acceptance.py
ACCEPTANCE: list = []


@pytest.fixture
def criterion():
    def record(number: str, passed: bool, detail: str = "") -> bool:
        ACCEPTANCE.append((number, bool(passed), detail))
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE, key=lambda r: int(r[0])):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
