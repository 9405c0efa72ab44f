import numpy as np
import pytest

import rckit


@pytest.fixture(scope="session")
def tool_config():
    return rckit.load_config(None)


@pytest.fixture(scope="session")
def plant(tool_config):
    return tool_config.plant


@pytest.fixture(scope="session")
def signals(tool_config):
    return tool_config.signals


@pytest.fixture(scope="session")
def plant_tf(tool_config):
    return tool_config.plant_tf()


@pytest.fixture(scope="session")
def design_traditional(tool_config):
    return tool_config.synthesize([1.0])


@pytest.fixture(scope="session")
def design_higher_order(tool_config):
    return tool_config.synthesize([2.0, -1.0])


def small_test_plant():
    """Stable first-order discrete plant for fast runtime tests."""
    num = rckit.Polynomial([0.2, 0.4])
    den = rckit.Polynomial([0.06, -0.5, 1.0])   # (z - 0.2)(z - 0.3)
    return rckit.RationalFunction(num, den)


def random_stable_ratfn(rng, max_degree=4, min_phase=True):
    """Random stable biproper rational function from root draws."""
    n = int(rng.integers(1, max_degree + 1))
    poles = rng.uniform(-0.85, 0.85, size=n)
    if min_phase:
        zeros = rng.uniform(-0.85, 0.85, size=n)
    else:
        zeros = rng.uniform(-0.85, 0.85, size=n)
        zeros[0] = rng.uniform(1.3, 4.0) * rng.choice([-1.0, 1.0])
    gain = float(rng.uniform(0.2, 2.0))
    return rckit.RationalFunction(
        rckit.poly_from_roots(zeros, gain=gain), rckit.poly_from_roots(poles))
