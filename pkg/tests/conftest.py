import pytest

from gtdyn.params import UvParams, ZwParams

_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record the one-line verdict of an acceptance criterion."""

    def record(number: int, passed: bool, detail: str) -> bool:
        _CRITERIA[number] = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(_CRITERIA[number])
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[number])


@pytest.fixture
def half_uv():
    return UvParams.from_values(0.5, 0.5, 0.5, 0.5)


@pytest.fixture
def half_zw():
    return ZwParams.from_values(0.5, 0.5, 0.5, 0.5)


@pytest.fixture
def complex_zw():
    return ZwParams.from_values(0.5 + 1j, 0.5 - 1j, 0.3, 0.3)
