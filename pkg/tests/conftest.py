"""Shared fixtures and hypothesis settings for the suite."""

import math

import pytest
from hypothesis import HealthCheck, settings

import wellsolver as ws

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def moderate_model():
    # both channels well bound, tunneling visible but far above the
    # conditioning floor of the transcendental solve
    return ws.solve_asymmetric(3.0, math.sqrt(0.5), 1.0, 2.0)


@pytest.fixture(scope="session")
def moderate_grid(moderate_model):
    return ws.squarewell_grid(moderate_model, 400.0)
