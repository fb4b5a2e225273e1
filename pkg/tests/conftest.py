"""
Shared fixtures
"""

import math

import numpy as np
import pytest

from src.config import Settings, settings
from src.dynamics.maps import MapSystem, builtin_map

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


# Module level so systems built from them pickle into worker processes

def doubling_step(x, p):
    return 2.0 * x


def doubling_jacobian(x, p):
    return np.full(np.shape(x) + (1,), 2.0)


def linear_step(x, p):
    return np.stack([2.0 * x[..., 0], 0.5 * x[..., 1]], axis=-1)


def linear_jacobian(x, p):
    jac = np.zeros(np.shape(x)[:-1] + (2, 2))
    jac[..., 0, 0] = 2.0
    jac[..., 1, 1] = 0.5
    return jac


@pytest.fixture(autouse=True)
def restore_settings():
    """Undo changes a test makes to the global settings"""
    saved = {name: getattr(settings, name) for name in Settings.model_fields}
    yield
    for name, value in saved.items():
        setattr(settings, name, value)


@pytest.fixture
def golden():
    return GOLDEN


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture
def logistic():
    return builtin_map("logistic", {"a": 3.71})


@pytest.fixture
def doubling_map():
    return MapSystem(
        name="doubling", dimension=1, lower=(0.0,), upper=(1.0,),
        step_fn=doubling_step, jacobian_fn=doubling_jacobian,
        wrap=(1.0,), default_x0=(0.1,),
    )


@pytest.fixture
def linear_map():
    return MapSystem(
        name="linear", dimension=2, lower=(-1.0, -1.0), upper=(1.0, 1.0),
        step_fn=linear_step, jacobian_fn=linear_jacobian, default_x0=(0.0, 0.0),
    )


@pytest.fixture
def random_model(rng):
    """Factory for random row-consistent joint distributions"""
    def make(size: int = 5, density: float = 0.6):
        joint = rng.random((size, size)) * (rng.random((size, size)) < density)
        joint[np.arange(size), rng.integers(0, size, size)] += 0.01
        return joint / joint.sum()
    return make
