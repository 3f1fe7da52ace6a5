"""Virtual mass density from image detail and motion, and inhibition of return."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import GridMismatch, NonMonotonicTime, OutOfDomain
from .grid import Grid, check_same_grid


@dataclass
class Frame:
    brightness: np.ndarray
    timestamp: float = 0.0

    def __post_init__(self):
        self.brightness = np.clip(np.asarray(self.brightness, dtype=float), 0.0, 1.0)

    @property
    def grid(self):
        return Grid.of(self.brightness)


@dataclass(frozen=True)
class MassParams:
    alpha1: float = 1.0  # detail weight
    alpha2: float = 1.0  # motion weight
    k: float = 250000.0  # potential rescale
    beta: float = 10.0  # IoR deposit rate, 1/s
    sigma: Optional[float] = None  # IoR footprint radius in px; None means width/16
    gamma: float = 0.1  # IoR recovery rate, 1/s
    normalize: bool = False  # rescale detail+motion to unit total mass before k

    def __post_init__(self):
        if self.alpha1 < 0 or self.alpha2 < 0 or self.beta < 0 or self.gamma < 0:
            raise ValueError("alpha1, alpha2, beta, gamma must be nonnegative")
        if self.k <= 0:
            raise ValueError("k must be positive")
        if self.sigma is not None and self.sigma <= 0:
            raise ValueError("sigma must be positive")

    def sigma_for(self, grid):
        return self.sigma if self.sigma is not None else grid.width / 16.0


def detail_magnitude(b):
    """Central-difference gradient magnitude of ``b`` with a zero boundary ring."""
    b = np.asarray(b, dtype=float)
    out = np.zeros_like(b)
    gx = 0.5 * (b[1:-1, 2:] - b[1:-1, :-2])
    gy = 0.5 * (b[2:, 1:-1] - b[:-2, 1:-1])
    out[1:-1, 1:-1] = np.hypot(gx, gy)
    return out


def compute_mass(curr, prev, inhibition, params):
    """Mass density ``k * (alpha1*|grad b| + alpha2*|db/dt|) * (1 - inhibition)``.

    The motion term is a backward frame difference and vanishes when ``prev``
    is ``None``. With ``params.normalize`` the bracket is divided by its
    total so that ``k`` sets the total mass of an uninhibited frame.
    """
    b = curr.brightness
    inhibition = np.asarray(inhibition, dtype=float)
    try:
        check_same_grid(b, inhibition)
    except GridMismatch:
        raise GridMismatch(f"inhibition field {inhibition.shape} does not match frame {b.shape}")
    mu = params.alpha1 * detail_magnitude(b)
    if prev is not None:
        check_same_grid(b, prev.brightness)
        dt = curr.timestamp - prev.timestamp
        if not dt > 0:
            raise NonMonotonicTime(f"frame timestamps {prev.timestamp} -> {curr.timestamp}")
        mu = mu + params.alpha2 * np.abs(b - prev.brightness) / dt
    if params.normalize:
        total = mu.sum()
        if total > 0:
            mu = mu / total
    mu = params.k * mu * (1.0 - inhibition)
    return np.maximum(mu, 0.0)


def gaussian_footprint(grid, center, sigma):
    ys, xs = np.mgrid[0:grid.height, 0:grid.width]
    r2 = (xs - center[0]) ** 2 + (ys - center[1]) ** 2
    return np.exp(-r2 / (2.0 * sigma * sigma))


def update_inhibition(inhibition, foa, params, tau):
    """One explicit step of the inhibition-of-return field.

    ``I' = clip(I + beta*tau*G(x - foa) - gamma*tau*I, 0, 1)`` with ``G`` a
    unit-height Gaussian of radius ``sigma``.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    inhibition = np.asarray(inhibition, dtype=float)
    grid = Grid.of(inhibition)
    if not grid.contains(foa):
        raise OutOfDomain(f"FOA {tuple(foa)} outside retina {grid.width}x{grid.height}")
    deposit = params.beta * tau * gaussian_footprint(grid, foa, params.sigma_for(grid))
    return np.clip(inhibition + deposit - params.gamma * tau * inhibition, 0.0, 1.0)
