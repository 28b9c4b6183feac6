import pytest

from pavecarbon.scenarios import bundled_factors, bundled_pms_params, bundled_scenarios, data_path
from pavecarbon.sensitivity import load_vectors

_acceptance: dict[str, str] = {}


@pytest.fixture(scope="session")
def factors():
    return bundled_factors()


@pytest.fixture(scope="session")
def scenarios():
    return bundled_scenarios()


@pytest.fixture(scope="session")
def pms_params():
    return bundled_pms_params()


@pytest.fixture(scope="session")
def restricted_vectors():
    return load_vectors(data_path("vectors_restricted.csv"))


@pytest.fixture(scope="session")
def extreme_vectors():
    return load_vectors(data_path("vectors_extreme.csv"))


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or report.outcome != "passed":
        name = report.nodeid.split("::")[-1]
        if report.outcome == "failed" or name not in _acceptance:
            _acceptance[name] = report.outcome.upper()


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_acceptance.items()):
        terminalreporter.write_line(f"{'PASS' if outcome == 'PASSED' else 'FAIL'}  {name}")
