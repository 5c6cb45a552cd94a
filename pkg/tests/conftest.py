import pytest

from seirs_control import SweepConfig, solve_uncontrolled, sweep, table1_default
from seirs_control.scenario import Scenario

# filled by test_acceptance; printed once at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def table1():
    return table1_default()


@pytest.fixture(scope="session")
def default_cfg():
    return SweepConfig()


@pytest.fixture(scope="session")
def solved(default_cfg):
    """Converged default-grid solutions keyed by ``per``, solved once per session."""
    cache = {}

    def get(per: float = 0.0):
        if per not in cache:
            cache[per] = sweep(default_cfg, Scenario(per=per))
        return cache[per]

    return get


@pytest.fixture(scope="session")
def uncontrolled(default_cfg):
    cache = {}

    def get(per: float = 0.0):
        if per not in cache:
            cache[per] = solve_uncontrolled(default_cfg, Scenario(per=per))
        return cache[per]

    return get


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
