import math

import pytest

from gomboc import kernels
from gomboc.surface import gomboc1, gomboc2

_acceptance = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, text): numbered exit criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is not None and rep.when == "call":
        number, text = marker.args
        extra = ", ".join(f"{k}={v}" for k, v in item.user_properties)
        _acceptance.append((number, item.name, text, rep.passed, extra))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, text, passed, extra in sorted(_acceptance):
        line = f"[{number}] {'PASS' if passed else 'FAIL'}  {text}  ({name})"
        if extra:
            line += f"  [{extra}]"
        terminalreporter.write_line(line)


@pytest.fixture(params=sorted(kernels.available_backends()))
def backend(request, monkeypatch):
    """Run a test once per importable kernel backend."""
    monkeypatch.setattr(kernels, "_impl", kernels.available_backends()[request.param])
    return request.param


@pytest.fixture
def g1():
    return gomboc1(0.15)


@pytest.fixture
def g2():
    return gomboc2(0.17)


@pytest.fixture(params=["g1", "g2"])
def preset(request):
    return {"g1": gomboc1(0.15), "g2": gomboc2(0.17)}[request.param]


HALF_PI = 0.5 * math.pi
