import numpy as np
import pytest

from gamowlab import DeltaShellModel, RotatedContour, sector_poles, standard_state

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def model10():
    return DeltaShellModel(10.0, 1.0)


@pytest.fixture(scope="session")
def state10(model10):
    return standard_state(model10)


@pytest.fixture(scope="session")
def contour45():
    return RotatedContour(theta=np.pi / 4)


@pytest.fixture(scope="session")
def poles45(model10, contour45):
    return sector_poles(model10, contour45)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance():
    """Record and print one pass/fail line per criterion, then assert it."""

    def report(number: int, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return report
