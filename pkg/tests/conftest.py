"""Shared fixtures: shipped cycle specs, a seeded generator and an RK4 period oracle."""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
from config.config import CYCLES_DIR
from src.spec_io import load_cycle_spec

RK4_STEPS = 20_000


@pytest.fixture
def rng():
    return np.random.default_rng(142)


@pytest.fixture
def boost_spec():
    return load_cycle_spec(CYCLES_DIR / 'boost.json')


@pytest.fixture
def buck_spec():
    return load_cycle_spec(CYCLES_DIR / 'buck.json')


@pytest.fixture
def sign_spec():
    return load_cycle_spec(CYCLES_DIR / 'sign_symmetric.json')


def rk4_period(cycle, x0, steps=RK4_STEPS):
    """Integrate one period with classical RK4, then apply the reset map."""
    x = np.array(x0, dtype=float)
    for sub in cycle.subintervals:
        h = sub.T / steps
        Bu = sub.B @ cycle.u

        def f(state):
            return sub.A @ state + Bu

        for _ in range(steps):
            k1 = f(x)
            k2 = f(x + 0.5 * h * k1)
            k3 = f(x + 0.5 * h * k2)
            k4 = f(x + h * k3)
            x = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if cycle.reset is not None:
        x = cycle.reset @ x
    return x
