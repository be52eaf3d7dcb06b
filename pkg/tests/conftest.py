import pytest

from qmoments import QParam


@pytest.fixture(params=[0.3, 0.5, 0.9], ids=lambda q: f"q={q}")
def qp(request):
    return QParam(request.param)


@pytest.fixture
def qp05():
    return QParam(0.5)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
