"""Oracle checks run by ``foawave verify``."""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from .errors import FoaError
from .grid import Grid
from .oracles import (analytic_heat_kernel, analytic_point_mass_wave,
                      three_blob_mass, verify_limit)
from .pde import (H_PRESET, IMPLICIT, PdeParams, PotentialState,
                  discrete_energy, evolve, solve_poisson, stability_bound, step)


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float = float("nan")
    tolerance: float = float("nan")
    detail: str = ""
    seconds: float = 0.0
    skipped: bool = False

    def line(self):
        status = "SKIP" if self.skipped else ("PASS" if self.passed else "FAIL")
        return (f"[{status}] {self.name}: measured={self.measured:.4g} "
                f"tolerance={self.tolerance:.4g} ({self.seconds:.1f}s) {self.detail}").rstrip()


def dense_shifted_laplacian(grid, shift):
    """Dense matrix of ``shift*I - lap`` on the interior unknowns (row-major)."""
    hi, wi = grid.height - 2, grid.width - 2
    n = hi * wi
    a = np.zeros((n, n))
    for i in range(hi):
        for j in range(wi):
            r = i * wi + j
            a[r, r] = shift + 4.0
            for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                ii, jj = i + di, j + dj
                if 0 <= ii < hi and 0 <= jj < wi:
                    a[r, ii * wi + jj] = -1.0
    return a


def dense_solve(shift, rhs):
    grid = Grid.of(rhs)
    a = dense_shifted_laplacian(grid, shift)
    x = np.zeros(grid.shape)
    x[1:-1, 1:-1] = np.linalg.solve(a, rhs[1:-1, 1:-1].ravel()).reshape(grid.height - 2, grid.width - 2)
    return x


def point_mass_wave_errors(size=257, ct=64.0, radii=(8, 16, 32), tau=0.125, threads=1):
    """Relative errors of stepped potential differences against the closed form."""
    params = PdeParams(m=1.0, d=1e-3, c=1.0, tau=tau)
    if tau > stability_bound(params) / 4:
        raise ValueError("tau must not exceed a quarter of the stability bound")
    c0 = size // 2
    mu = np.zeros((size, size))
    mu[c0, c0] = 1.0
    n = int(round(ct / tau))
    phi = evolve(params, mu, n, IMPLICIT, threads=threads).phi_curr
    t = n * tau
    errs = {}
    for a_i, r1 in enumerate(radii):
        for r2 in radii[a_i + 1:]:
            num = phi[c0, c0 + r1] - phi[c0, c0 + r2]
            ana = analytic_point_mass_wave(r1, t, 1.0) - analytic_point_mass_wave(r2, t, 1.0)
            errs[(r1, r2)] = abs(num - ana) / abs(ana)
    return errs


HEAT_PROBES = ((0, 0), (3, 0), (0, 5), (4, 4), (8, 0))


def heat_kernel_errors(size=129, tau=2e-5, diffusion_times=(20.0, 30.0, 40.0, 50.0), threads=1):
    """H-preset response to a one-step impulse versus the analytic heat kernel.

    ``diffusion_times`` are values of ``c*t`` (px^2) at which to probe.
    Returns ``{(c*t, probe): relative error}``.
    """
    params = replace(H_PRESET, tau=tau)
    diffusivity = params.c / params.d
    half = (size - 1) / 2
    c0 = size // 2
    impulse = np.zeros((size, size))
    impulse[c0, c0] = 1.0
    zero = np.zeros((size, size))
    state = step(PotentialState.initial(Grid(size, size), params), impulse, IMPLICIT, threads=threads)
    n = 1
    errs = {}
    for s in diffusion_times:
        if np.sqrt(2.0 * s) >= half / 6.0:
            raise ValueError(f"c*t={s} too late: kernel would feel the boundary")
        while diffusivity * n * tau < s - 1e-9:
            state = step(state, zero, IMPLICIT, threads=threads)
            n += 1
        t = n * tau
        phi = state.phi_curr * (params.d / tau)  # unit total mass
        for dx, dy in HEAT_PROBES:
            exact = analytic_heat_kernel(np.hypot(dx, dy), t, diffusivity)
            errs[(s, (dx, dy))] = abs(phi[c0 + dy, c0 + dx] - exact) / exact
    return errs


def energy_violations(runs=100, size=16, steps=40, seed=0, tol=1e-8):
    """Count steps where the discrete energy of a sourceless damped wave grows."""
    rng = np.random.default_rng(seed)
    violations = 0
    for _ in range(runs):
        params = PdeParams(m=float(rng.uniform(0.05, 2.0)), d=float(rng.uniform(0.01, 1.0)),
                           c=1.0, tau=float(rng.uniform(0.01, 0.5)))
        phi0 = np.zeros((size, size))
        phi0[1:-1, 1:-1] = rng.standard_normal((size - 2, size - 2))
        phi1 = np.zeros((size, size))
        phi1[1:-1, 1:-1] = phi0[1:-1, 1:-1] + 0.1 * rng.standard_normal((size - 2, size - 2))
        state = PotentialState(phi1, phi0, 1, params)
        zero = np.zeros((size, size))
        energy = discrete_energy(state)
        for _ in range(steps):
            state = step(state, zero, IMPLICIT, tol=tol)
            e_new = discrete_energy(state)
            if e_new > energy:
                violations += 1
            energy = e_new
    return violations


def _timed(name, fn, tolerance):
    t0 = time.perf_counter()
    try:
        measured, passed, detail = fn()
    except FoaError as exc:
        return CheckResult(name, False, tolerance=tolerance, detail=f"{type(exc).__name__}: {exc}",
                           seconds=time.perf_counter() - t0)
    return CheckResult(name, passed, measured, tolerance, detail, time.perf_counter() - t0)


def run_suite(pde=None, scheme=IMPLICIT, grid=None, threads=1):
    """Run every oracle check; ``grid`` shrinks all domains for a smoke run."""
    results = []

    def wave():
        errs = point_mass_wave_errors(threads=threads)
        worst = max(errs.values())
        return worst, worst <= 0.05, " ".join(f"{a}-{b}:{e:.2%}" for (a, b), e in errs.items())

    def heat():
        errs = heat_kernel_errors(threads=threads)
        worst = max(errs.values())
        return worst, worst <= 0.02, f"{len(errs)} probes"

    if grid is None or grid >= 257:
        results.append(_timed("point-mass wave potential", wave, 0.05))
    else:
        results.append(CheckResult("point-mass wave potential", True, detail="needs a 257 grid",
                                   skipped=True))
    if grid is None or grid >= 129:
        results.append(_timed("heat kernel", heat, 0.02))
    else:
        results.append(CheckResult("heat kernel", True, detail="needs a 129 grid", skipped=True))

    def convergence():
        size = 65 if grid is None else grid
        # smaller domains settle faster; keep the step at 0.5
        settle = max(10.0, 100.0 * (size - 1) / 64.0)
        report = verify_limit(three_blob_mass(size), (1, 2, 4, 8), settle_time=settle,
                              n_steps=max(3, int(round(settle / 0.5))), threads=threads)
        ratio = max(report.heat_errors[-1] / report.heat_errors[0],
                    report.wave_errors[-1] / report.wave_errors[0])
        ok = report.strictly_decreasing and ratio < 0.25
        detail = ("heat " + ",".join(f"{e:.3g}" for e in report.heat_errors)
                  + " wave " + ",".join(f"{e:.3g}" for e in report.wave_errors))
        return ratio, ok, detail

    results.append(_timed("large-speed convergence e(8)/e(1)", convergence, 0.25))

    def poisson():
        size = 16 if grid is None else grid
        rng = np.random.default_rng(1)
        worst = 0.0
        for _ in range(10):
            mu = np.zeros((size, size))
            mu[1:-1, 1:-1] = rng.uniform(0, 1, (size - 2, size - 2))
            worst = max(worst, float(np.max(np.abs(solve_poisson(mu) - dense_solve(0.0, mu)))))
        return worst, worst <= 1e-7, "10 random masses"

    results.append(_timed("Poisson vs dense solve", poisson, 1e-7))

    def energy():
        size = 16 if grid is None else grid
        runs = 100 if grid is None else 10
        v = energy_violations(runs=runs, size=size)
        return float(v), v == 0, f"{runs} runs"

    results.append(_timed("damped-wave energy dissipation", energy, 0.0))

    if pde is not None:
        def configured():
            size = 16 if grid is None else grid
            state = PotentialState.initial(Grid(size, size), pde)
            mu = np.zeros((size, size))
            mu[size // 2, size // 2] = 1.0
            step(state, mu, scheme)
            bound = stability_bound(pde)
            return pde.tau, True, f"scheme={scheme} explicit bound={bound:.4g}"

        results.append(_timed("configured scheme is usable", configured, stability_bound(pde)))
    return results
