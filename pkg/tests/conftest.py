from __future__ import annotations

import sys

import pytest
from hypothesis import HealthCheck, settings

from qleak.io import load_code

settings.register_profile("qleak", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qleak")


@pytest.fixture(scope="session")
def ex421():
    return load_code("example421")


@pytest.fixture(scope="session")
def ex424():
    return load_code("example424")



def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
