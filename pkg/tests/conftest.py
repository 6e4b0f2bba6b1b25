import pytest

from bitebullet import CostSchedule, DamageDynamics, TemperatureModel

# criterion id -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture
def dyn():
    return DamageDynamics()


@pytest.fixture
def cost():
    return CostSchedule(K=60.0, q=0.0)


@pytest.fixture
def tm():
    return TemperatureModel()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0][1:])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {detail}")
