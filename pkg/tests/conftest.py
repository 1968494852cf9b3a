from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from famalyze.frontend import parse

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def load(name: str):
    path = FIXTURES / name
    return parse(path.read_text(), name=path.name)


@pytest.fixture
def simple():
    return load("simple.fam")


@pytest.fixture(params=sorted(p.name for p in FIXTURES.glob("*.fam")))
def fixture_program(request):
    return load(request.param)


# one PASS/FAIL line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
