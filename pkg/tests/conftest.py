import pytest

from xchainsim.chain import Address
from xchainsim.harness import Harness
from xchainsim.sim import Simulation


@pytest.fixture
def sim():
    return Simulation(seed=0, name="test")


@pytest.fixture
def two_chains(sim):
    a = sim.create_chain("alpha", 1)
    b = sim.create_chain("beta", 2)
    return sim, a, b


def addr(chain, name):
    return Address.named(chain, name)


def attach_harness(sim):
    return Harness(sim)


_criteria: dict[str, tuple[int, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.failed and item.nodeid not in _criteria):
        _criteria[item.nodeid] = (marker.args[0], marker.args[1], rep.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, outcome in sorted(_criteria.values()):
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  [{number}] {title}")
