import pytest

ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def acceptance():
    """Record one acceptance line: ``acceptance(number, name, ok, detail)``."""

    def record(number: int, name: str, ok: bool, detail: str = "") -> None:
        ACCEPTANCE[number] = (name, ok, detail)
        print(_line(number, name, ok, detail))

    return record


def _line(number, name, ok, detail):
    tail = f" ({detail})" if detail else ""
    return f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {name}{tail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(_line(number, *ACCEPTANCE[number]))
