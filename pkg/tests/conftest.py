import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from twophase.equilibria import Domain, build_equilibrium
from twophase.thermo import default_materials

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def ms():
    return default_materials()


@pytest.fixture(scope="session")
def eq3(ms):
    return build_equilibrium(ms, Domain(3, 2.0), 1, radius=1.0, theta=1.0)


@pytest.fixture(scope="session")
def eq2(ms):
    return build_equilibrium(ms, Domain(2, 2.0), 1, radius=1.0, theta=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)



def pytest_terminal_summary(terminalreporter):
    import sys

    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
