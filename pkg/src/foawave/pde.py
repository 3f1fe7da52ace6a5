"""Time stepping of the attention potential (heat, wave and damped wave).

All models share one discretization of

    (m / c**2) phi_tt + (d / c) phi_t = lap(phi) + mu,   phi = 0 on the boundary,

with a backward second difference in time, a backward first difference for
the drag term and the unit-spacing 5-point Laplacian. ``m = 0`` gives the
heat model with diffusivity ``c / d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import Degenerate, SolverDiverged, Unstable
from .grid import Grid, apply_dirichlet, check_same_grid, laplacian_5pt

EXPLICIT = "explicit"
IMPLICIT = "implicit"
SCHEMES = (EXPLICIT, IMPLICIT)


@dataclass(frozen=True)
class PdeParams:
    m: float  # inertial coefficient
    d: float  # drag coefficient
    c: float = 1.0  # propagation speed
    tau: float = 0.04  # time step, s

    def __post_init__(self):
        if self.m < 0 or self.d < 0:
            raise ValueError("m and d must be nonnegative")
        if self.c <= 0 or self.tau <= 0:
            raise ValueError("c and tau must be positive")
        if self.m == 0 and self.d == 0:
            raise Degenerate("m = d = 0 leaves no time derivative")

    @property
    def m_eff(self):
        return self.m / (self.c * self.c)

    @property
    def d_eff(self):
        return self.d / self.c

    def coefficients(self):
        """``(a, b, e)`` with ``a*phi[n+1] = lap + mu + b*phi[n] - e*phi[n-1]``."""
        tau = self.tau
        e = self.m_eff / tau ** 2
        a = e + self.d_eff / tau
        b = 2.0 * e + self.d_eff / tau
        return a, b, e


H_PRESET = PdeParams(m=0.0, d=1.0 / 2500.0, c=1.0, tau=0.04)
DW_PRESET = PdeParams(m=1.0 / 25000.0, d=1.0 / 100.0, c=1.0, tau=0.04)
PRESETS = {"H": H_PRESET, "DW": DW_PRESET}


@dataclass(frozen=True)
class PotentialState:
    phi_curr: np.ndarray
    phi_prev: np.ndarray
    step_index: int
    params: PdeParams

    @classmethod
    def initial(cls, grid, params):
        return cls(grid.zeros(), grid.zeros(), 0, params)


def stability_bound(params):
    """Largest time step for which the explicit scheme is stable."""
    m, d = params.m_eff, params.d_eff
    if m == 0 and d == 0:
        raise Degenerate("m = d = 0")
    if m == 0:
        return d / 4.0
    return math.sqrt(m / 2.0)


def _dot(u, v):
    # np.sum reduces pairwise in a fixed order: run-to-run reproducible
    return float(np.sum(u * v))


def shifted_apply(x, shift, threads=1, out=None):
    """``shift*x - lap(x)`` on the interior, zero on the boundary ring."""
    out = laplacian_5pt(x, threads=threads, out=out)
    np.negative(out, out=out)
    out[1:-1, 1:-1] += shift * x[1:-1, 1:-1]
    return out


def cg_solve(shift, rhs, x0=None, tol=1e-8, max_iter=None, threads=1):
    """Conjugate gradients for ``(shift - lap) x = rhs`` with Dirichlet boundary.

    Stops when ``max|residual| <= tol * max|rhs|`` (checked on the true
    residual). Returns ``(x, iterations)``.
    """
    rhs = apply_dirichlet(rhs)
    h, w = rhs.shape
    if max_iter is None:
        max_iter = 10 * (w + h)
    x = apply_dirichlet(x0) if x0 is not None else np.zeros_like(rhs)
    target = tol * float(np.max(np.abs(rhs)))
    if target == 0.0:
        return np.zeros_like(rhs), 0

    ap = np.empty_like(rhs)
    r = rhs - shifted_apply(x, shift, threads, out=ap)
    it = 0
    while True:
        if float(np.max(np.abs(r))) <= target:
            return x, it
        p = r.copy()
        rr = _dot(r, r)
        # inner loop on the recurrence residual; the true residual is re-checked on exit
        while it < max_iter:
            shifted_apply(p, shift, threads, out=ap)
            pap = _dot(p, ap)
            if not pap > 0:
                break
            alpha = rr / pap
            x += alpha * p
            r -= alpha * ap
            it += 1
            if float(np.max(np.abs(r))) <= target:
                break
            rr_new = _dot(r, r)
            p *= rr_new / rr
            p += r
            rr = rr_new
        r = rhs - shifted_apply(x, shift, threads, out=ap)
        if it >= max_iter:
            if float(np.max(np.abs(r))) <= target:
                return x, it
            raise SolverDiverged(f"CG did not converge in {max_iter} iterations "
                                 f"(residual {np.max(np.abs(r)):.3e}, target {target:.3e})")


def step(state, mass, scheme=IMPLICIT, threads=1, tol=1e-8):
    """Advance the potential one time step with source ``mass``."""
    params = state.params
    mass = np.asarray(mass, dtype=float)
    check_same_grid(state.phi_curr, mass)
    a, b, e = params.coefficients()
    phi, phi_old = state.phi_curr, state.phi_prev
    memory = b * phi - e * phi_old if e else b * phi

    if scheme == EXPLICIT:
        bound = stability_bound(params)
        if params.tau > bound * (1 + 1e-12):
            raise Unstable(f"tau={params.tau:g} exceeds explicit stability bound {bound:g}")
        new = (laplacian_5pt(phi, threads=threads) + mass + memory) / a
        new = apply_dirichlet(new)
    elif scheme == IMPLICIT:
        new, _ = cg_solve(a, mass + memory, x0=phi, tol=tol, threads=threads)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")

    if not np.all(np.isfinite(new)):
        raise Unstable("non-finite potential")
    return PotentialState(new, phi, state.step_index + 1, params)


def evolve(params, mass, n_steps, scheme=IMPLICIT, state=None, threads=1):
    """Step ``n_steps`` times under a static source; returns the final state."""
    mass = np.asarray(mass, dtype=float)
    if state is None:
        state = PotentialState.initial(Grid.of(mass), params)
    elif state.params != params:
        state = replace(state, params=params)
    for _ in range(n_steps):
        state = step(state, mass, scheme, threads=threads)
    return state


def solve_poisson(mass, tol=1e-8, threads=1):
    """Discrete Poisson problem ``lap(phi) = -mass`` with zero boundary."""
    phi, _ = cg_solve(0.0, np.asarray(mass, dtype=float), tol=tol, threads=threads)
    return phi


def discrete_energy(state):
    """``sum m*((phi[n]-phi[n-1])/tau)**2 + sum over grid edges of (forward difference)**2``."""
    p = state.params
    phi = state.phi_curr
    kinetic = p.m_eff * _dot((phi - state.phi_prev) / p.tau, (phi - state.phi_prev) / p.tau)
    dx = np.diff(phi, axis=1)
    dy = np.diff(phi, axis=0)
    return kinetic + _dot(dx, dx) + _dot(dy, dy)
