"""Closed-form reference solutions and the large-speed convergence experiment."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (NonpositiveTime, OutsideLightCone, SingularEvaluation,
                     SingularOrigin)
from .grid import Grid, gradient_fields
from .pde import IMPLICIT, PdeParams, evolve, solve_poisson

TWO_PI = 2.0 * math.pi


def analytic_point_mass_wave(r, t, c):
    """Potential of a unit mass switched on at ``t = 0`` for the 2D wave equation.

    Valid inside the light cone ``0 < r <= c*t``.
    """
    ct = c * t
    if r == 0:
        raise SingularOrigin("potential is log-singular at r = 0")
    if r < 0 or r > ct:
        raise OutsideLightCone(f"r={r} outside light cone c*t={ct}")
    return (math.log(ct + math.sqrt(ct * ct - r * r)) + math.log(1.0 / r)) / TWO_PI


def analytic_heat_kernel(r, t, c):
    """Heat kernel of ``u_t = c * lap(u)`` in 2D at radius ``r`` and time ``t``."""
    if t <= 0:
        raise NonpositiveTime(f"t={t}")
    s = c * t
    return math.exp(-r * r / (4.0 * s)) / (4.0 * math.pi * s)


def gravitational_gradient_bruteforce(mass, p):
    """Free-space gradient ``-(1/2pi) sum_y (p - y)/|p - y|^2 mass(y)`` by direct summation."""
    mass = np.asarray(mass, dtype=float)
    ys, xs = np.nonzero(mass)
    m = mass[ys, xs]
    dx = p[0] - xs
    dy = p[1] - ys
    r2 = dx * dx + dy * dy
    if np.any(r2 == 0):
        raise SingularEvaluation(f"probe {tuple(p)} sits on a nonzero mass node")
    gx = -np.sum(dx / r2 * m) / TWO_PI
    gy = -np.sum(dy / r2 * m) / TWO_PI
    return float(gx), float(gy)


@dataclass
class ConvergenceReport:
    c_values: list
    heat_errors: list
    wave_errors: list
    reference_norm: float
    settle_time: float
    n_steps: int
    wave_drag: float
    notes: list = field(default_factory=list)

    @staticmethod
    def _decreasing(errs, strict):
        pairs = list(zip(errs[:-1], errs[1:]))
        if strict:
            return all(b < a for a, b in pairs)
        return all(b <= a for a, b in pairs)

    @property
    def heat_nonincreasing(self):
        return self._decreasing(self.heat_errors, strict=False)

    @property
    def wave_nonincreasing(self):
        return self._decreasing(self.wave_errors, strict=False)

    @property
    def nonincreasing(self):
        return self.heat_nonincreasing and self.wave_nonincreasing

    @property
    def strictly_decreasing(self):
        return (self._decreasing(self.heat_errors, strict=True)
                and self._decreasing(self.wave_errors, strict=True))

    def as_dict(self):
        return {
            "c": list(self.c_values),
            "heat_errors": list(self.heat_errors),
            "wave_errors": list(self.wave_errors),
            "reference_norm": self.reference_norm,
            "settle_time": self.settle_time,
            "n_steps": self.n_steps,
            "wave_drag": self.wave_drag,
            "nonincreasing": self.nonincreasing,
            "strictly_decreasing": self.strictly_decreasing,
        }


def gradient_error(phi, reference_grad, margin=1):
    """Max over interior probe nodes of the Euclidean gradient difference."""
    gx, gy = gradient_fields(phi)
    rx, ry = reference_grad
    s = np.s_[margin:-margin, margin:-margin]
    return float(np.max(np.hypot(gx[s] - rx[s], gy[s] - ry[s])))


def verify_limit(mass, c_list, settle_time, n_steps=200, wave_drag=1e-3, threads=1):
    """Compare gradients of evolved heat/wave potentials with the Poisson gradient.

    For each speed ``c`` the heat model ``phi_t / c = lap + mu`` and the
    lightly damped wave ``phi_tt / c**2 + wave_drag * phi_t = lap + mu`` are
    stepped implicitly from rest for ``settle_time`` (``n_steps`` steps)
    under the static ``mass``. Errors are measured against the Poisson
    solution on the same Dirichlet domain, where reflected waves never leave:
    the wave branch settles only through dissipation, i.e. the drag (decay
    rate ``wave_drag * c**2 / 2``) and the implicit scheme's own damping.
    """
    mass = np.asarray(mass, dtype=float)
    c_list = [float(c) for c in c_list]
    if len(c_list) < 3 or any(b <= a for a, b in zip(c_list[:-1], c_list[1:])):
        raise ValueError("c_list must be strictly ascending with at least 3 entries")
    if settle_time <= 0 or n_steps < 1:
        raise ValueError("settle_time and n_steps must be positive")
    tau = settle_time / n_steps

    reference = gradient_fields(solve_poisson(mass, threads=threads))
    ref_norm = float(np.max(np.hypot(*reference)))
    heat, wave = [], []
    for c in c_list:
        heat_params = PdeParams(m=0.0, d=1.0, c=c, tau=tau)
        wave_params = PdeParams(m=1.0 / (c * c), d=wave_drag, c=1.0, tau=tau)
        phi_h = evolve(heat_params, mass, n_steps, IMPLICIT, threads=threads).phi_curr
        phi_w = evolve(wave_params, mass, n_steps, IMPLICIT, threads=threads).phi_curr
        heat.append(gradient_error(phi_h, reference))
        wave.append(gradient_error(phi_w, reference))
    return ConvergenceReport(c_list, heat, wave, ref_norm, settle_time, n_steps, wave_drag)


def blob_mass(grid, centers, radius, amplitude=1.0):
    """Sum of Gaussian blobs, zero on the boundary ring; handy static test source."""
    ys, xs = np.mgrid[0:grid.height, 0:grid.width]
    mu = np.zeros(grid.shape)
    for cx, cy in centers:
        mu += amplitude * np.exp(-((xs - cx) ** 2 + (ys - cy) ** 2) / (2.0 * radius ** 2))
    mu[0, :] = mu[-1, :] = 0.0
    mu[:, 0] = mu[:, -1] = 0.0
    return mu


def three_blob_mass(size=65):
    g = Grid(size, size)
    s = size - 1
    return blob_mass(g, [(0.3 * s, 0.35 * s), (0.7 * s, 0.3 * s), (0.5 * s, 0.72 * s)],
                     radius=max(1.5, s / 24.0))
