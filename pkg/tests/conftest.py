from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from examforge.model import load_spec, synthetic_roster

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def spec():
    return load_spec(FIXTURES / "exam20.json")


@pytest.fixture(scope="session")
def roster():
    return synthetic_roster(81, seed=7)


# -- acceptance summary ----------------------------------------------------------

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): one numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    number, title = mark.args
    if rep.when == "call" or rep.failed:
        ok = rep.passed and _ACCEPTANCE.get(number, (True,))[0]
        _ACCEPTANCE[number] = (ok, title, rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        ok, title, secs = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title} ({secs:.2f}s)")
