import sys
import random

import pytest
from hypothesis import HealthCheck, settings

from sqposw.params import PublicParams, gen_modulus

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# 23 * 47; small enough to check by hand
TOY_DELTA = 1081
MODULUS_SEED = 20261016


@pytest.fixture(scope="session")
def setup512():
    return gen_modulus(512, retain_trapdoor=True, seed=MODULUS_SEED)


@pytest.fixture(scope="session")
def delta512(setup512):
    return setup512.delta


@pytest.fixture(scope="session")
def setup256():
    return gen_modulus(256, retain_trapdoor=True, seed=MODULUS_SEED + 1)


@pytest.fixture(scope="session")
def make_pp(delta512):
    def make(n, t=4, lam=64, delta=None):
        return PublicParams(lam=lam, n=n, delta=delta or delta512, t=t)

    return make


@pytest.fixture
def rng(request):
    # stable per test, independent of execution order
    return random.Random(request.node.nodeid)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in range(1, 13):
        terminalreporter.write_line(mod.RESULTS.get(k, f"criterion {k:>2}: no result (deselected, or errored before reporting)"))
