"""Shared quadrature oracles, independent of the library's own code paths."""

import math

import numpy as np
import pytest
from hypothesis import settings
from scipy.integrate import quad, simpson

settings.register_profile("ci", derandomize=True, deadline=None)
settings.load_profile("ci")


def gaussian_tail_quadrature(x):
    """Q(x) from its defining integral, via adaptive quadrature."""
    value, _ = quad(lambda t: math.exp(-t * t / 2) / math.sqrt(2 * math.pi), x, math.inf)
    return value


def normal_roughness_quadrature(mean, sigma):
    """Integral of the squared second derivative of a N(mean, sigma^2) pdf."""

    def squared_curvature(x):
        z = (x - mean) / sigma
        density = math.exp(-z * z / 2) / (sigma * math.sqrt(2 * math.pi))
        return (density * (z * z - 1.0) / sigma**2) ** 2

    value, _ = quad(squared_curvature, mean - 12 * sigma, mean + 12 * sigma, limit=200)
    return value


def kde_tail_mass(model, side, points=4097):
    """Simpson integral of a KDE below zero (side='below') or above (side='above')."""
    lo, hi = model.grid_support()
    if side == "below":
        if lo >= 0:
            return 0.0
        grid = np.linspace(lo, 0.0, points)
    else:
        if hi <= 0:
            return 0.0
        grid = np.linspace(0.0, hi, points)
    return float(simpson(model.evaluate(grid), x=grid))


@pytest.fixture
def q_oracle():
    return gaussian_tail_quadrature
