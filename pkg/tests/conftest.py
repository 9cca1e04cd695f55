import pathlib
import sys

import pytest

from faso import ground_program, parse_file, solve

ROOT = pathlib.Path(__file__).resolve().parent.parent
WATER = ROOT / "examples" / "water.faso"
FIXTURES = sorted((ROOT / "tests" / "fixtures").glob("*.faso"))


@pytest.fixture(scope="session")
def water_program():
    return parse_file(WATER)


@pytest.fixture(scope="session")
def water_ground(water_program):
    return ground_program(water_program)


@pytest.fixture(scope="session")
def water(water_program):
    return solve(water_program, strategy="pareto")


def find_model(models, x):
    """The answer set whose objective literal binds (x1, x2, x3)."""
    for m in models:
        for lit, _ in m.find("objective"):
            if tuple(a.value for a in lit.args[:3]) == tuple(float(v) for v in x):
                return m
    raise LookupError(x)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if not mod or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.line(n))
