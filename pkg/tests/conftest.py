"""Pytest configuration and fixtures."""

import math

import numpy as np
import pytest

from abflux.app import create_app
from abflux.params import Flux, LambdaParams, UParams


@pytest.fixture
def app():
    """Create application for testing."""
    app = create_app(config={"TESTING": True})
    yield app


@pytest.fixture
def client(app):
    """Create test client."""
    return app.test_client()


@pytest.fixture
def rng():
    """Deterministic random generator."""
    return np.random.default_rng(20240611)


@pytest.fixture
def half_flux():
    return Flux(0.5)


class ParameterSampler:
    """Random admissible parameters drawn from a seeded generator."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def flux(self, low: float = 0.05, high: float = 0.95) -> Flux:
        return Flux(float(self.rng.uniform(low, high)))

    def couplings(self, scale: float = 5.0, w_max: float = 5.0) -> LambdaParams:
        u, v = self.rng.uniform(-scale, scale, size=2)
        w = self.rng.uniform(0.0, w_max) * np.exp(1j * self.rng.uniform(0.0, 2.0 * math.pi))
        return LambdaParams(u=float(u), v=float(v), w=complex(w))

    def momentum(self, low: float = 0.01, high: float = 100.0) -> float:
        return float(math.exp(self.rng.uniform(math.log(low), math.log(high))))

    def unitary(self, flux: Flux, min_d: float = 1e-3) -> UParams:
        from abflux.params import d_invariant

        while True:
            omega, a, b = self.rng.uniform(0.0, 2.0 * math.pi, size=3)
            up = UParams(omega=float(omega), a=float(a), b=float(b), q=float(self.rng.uniform()))
            if abs(d_invariant(flux, up)) > min_d:
                return up


@pytest.fixture
def sampler(rng):
    """Random parameter sets for property tests."""
    return ParameterSampler(rng)
