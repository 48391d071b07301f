import numpy as np
import pytest

from anosovsh.models import EllipsoidModel, Roof, SyntheticModel, ToralSuspension

CAT = (2, 1, 1, 1)
NEG_CAT = (-2, -1, -1, -1)


@pytest.fixture
def cat():
    return ToralSuspension(CAT)


@pytest.fixture
def neg_cat():
    return ToralSuspension(NEG_CAT)


@pytest.fixture
def ellipsoid():
    return EllipsoidModel(1.0, float(np.sqrt(2.0)))


@pytest.fixture
def trig_cat():
    return ToralSuspension(CAT, Roof(1.0, ((1, 0, 0.3, 0.0),)))


def synthetic(*indices, period=1.0):
    """Synthetic model with the given indices and evenly spaced periods."""
    return SyntheticModel(tuple((mu, period + 0.01 * i) for i, mu in enumerate(indices)))


# --- acceptance report ---------------------------------------------------------

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when == "teardown":
        return
    number, title = marker.args
    if report.failed or report.when == "call":
        ok = _CRITERIA.get(number, (True,))[0] and not report.failed
        _CRITERIA[number] = (ok, title)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        ok, title = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")
