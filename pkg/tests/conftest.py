import pytest

from gamowjordan import HardyFunction, ResonanceModel

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when not in ("setup", "call"):
        return
    number, title = marker.args
    if rep.when == "setup" and rep.passed:
        return
    detail = dict(item.user_properties).get("measured", "")
    _CRITERIA[number] = (title, rep.passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok, detail = _CRITERIA[number]
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}: {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture
def model_r2():
    return ResonanceModel(E_R=1.0, Gamma=0.2, r=2)


@pytest.fixture
def psi_ref():
    return HardyFunction.from_poles([(2j, 2)])


@pytest.fixture
def phi_ref():
    return HardyFunction.from_poles([(3j, 2)])
