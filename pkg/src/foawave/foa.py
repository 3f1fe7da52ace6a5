"""Focus-of-attention trajectories, fixation extraction and model saliency maps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.ndimage import gaussian_filter

from .errors import EmptyInput, EmptyTrajectory
from .grid import Grid, Vec2, gradient_at
from .mass import Frame, MassParams, compute_mass, update_inhibition
from .pde import DW_PRESET, IMPLICIT, PdeParams, PotentialState, step


@dataclass(frozen=True)
class FoaState:
    pos: Vec2
    vel: Vec2 = Vec2(0.0, 0.0)


@dataclass(frozen=True)
class DynamicsParams:
    lam: float = 5.0  # dissipation, 1/s
    v_fix: float = 50.0  # fixation speed threshold, px/s
    t_fix: float = 0.1  # minimum fixation duration, s
    jitter: Optional[float] = None  # initial-position jitter radius in px; None means 5% of min(w, h)
    seed: int = 0

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        if self.v_fix <= 0 or self.t_fix <= 0:
            raise ValueError("v_fix and t_fix must be positive")
        if self.jitter is not None and self.jitter < 0:
            raise ValueError("jitter must be nonnegative")

    def jitter_for(self, grid):
        return self.jitter if self.jitter is not None else 0.05 * min(grid.width, grid.height)


@dataclass(frozen=True)
class Fixation:
    x: float
    y: float
    onset: float
    duration: float


@dataclass
class Scanpath:
    fixations: List[Fixation] = field(default_factory=list)
    stimulus: str = ""
    seed: Optional[int] = None
    model: Optional[str] = None

    def __len__(self):
        return len(self.fixations)

    def points(self):
        return np.array([(f.x, f.y) for f in self.fixations], dtype=float).reshape(-1, 2)


def step_foa(state, potential, params, tau):
    """Semi-implicit Euler step of ``a'' = grad(phi)(a) - lam * a'``.

    The position is clamped one pixel inside the retina; hitting a wall zeroes
    the velocity component normal to it.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    potential = np.asarray(potential, dtype=float)
    h, w = potential.shape
    gx, gy = gradient_at(potential, state.pos)
    vx = state.vel.x + tau * (gx - params.lam * state.vel.x)
    vy = state.vel.y + tau * (gy - params.lam * state.vel.y)
    x = state.pos.x + tau * vx
    y = state.pos.y + tau * vy
    lo_x, hi_x, lo_y, hi_y = 1.0, w - 2.0, 1.0, h - 2.0
    if not x >= lo_x:  # also catches NaN
        x, vx = lo_x, 0.0
    elif x > hi_x:
        x, vx = hi_x, 0.0
    if not y >= lo_y:
        y, vy = lo_y, 0.0
    elif y > hi_y:
        y, vy = hi_y, 0.0
    return FoaState(Vec2(x, y), Vec2(vx, vy))


def extract_fixations(trajectory, params, stimulus=""):
    """Velocity-threshold fixation detection on a uniformly sampled trajectory.

    ``trajectory`` is a sequence of ``(t, (x, y))``. Each sample stands for
    the interval up to the next one; its speed is the displacement to the
    next sample over the sampling step (the last sample reuses the previous
    speed). Runs slower than ``v_fix`` lasting at least ``t_fix`` become
    fixations located at the run centroid.
    """
    if len(trajectory) == 0:
        raise EmptyTrajectory("no samples")
    t = np.array([s[0] for s in trajectory], dtype=float)
    pos = np.array([tuple(s[1]) for s in trajectory], dtype=float).reshape(-1, 2)
    n = len(t)
    if n == 1:
        return Scanpath([], stimulus=stimulus)
    dt = (t[-1] - t[0]) / (n - 1)
    speed = np.empty(n)
    speed[:-1] = np.hypot(*np.diff(pos, axis=0).T) / dt
    speed[-1] = speed[-2]

    slow = speed < params.v_fix
    fixations = []
    i = 0
    while i < n:
        if not slow[i]:
            i += 1
            continue
        j = i
        while j < n and slow[j]:
            j += 1
        duration = (j - i) * dt
        # tolerance: run lengths are integer multiples of dt
        if duration >= params.t_fix - 1e-9 * dt:
            cx, cy = pos[i:j].mean(axis=0)
            fixations.append(Fixation(float(cx), float(cy), float(t[i]), float(duration)))
        i = j
    return Scanpath(fixations, stimulus=stimulus)


@dataclass
class SimulationResult:
    scanpath: Scanpath
    trajectory: list
    potential: np.ndarray
    mass: np.ndarray
    inhibition: np.ndarray
    inhibition_max: list
    pde_steps: int


def initial_position(grid, params):
    rng = np.random.default_rng(params.seed)
    radius = params.jitter_for(grid)
    r = radius * math.sqrt(rng.uniform())
    theta = rng.uniform(0.0, 2.0 * math.pi)
    c = grid.center
    x = min(max(c.x + r * math.cos(theta), 1.0), grid.width - 2.0)
    y = min(max(c.y + r * math.sin(theta), 1.0), grid.height - 2.0)
    return Vec2(x, y)


def simulate(frames, duration, pde=DW_PRESET, mass_params=MassParams(),
             dynamics=DynamicsParams(), scheme=IMPLICIT, threads=1,
             stimulus="", model=None, on_step=None):
    """Run one observer through a frame stream and return its scanpath.

    Each step computes the mass, advances the potential, moves the FOA and
    then updates the inhibition field. A single frame is held for the whole
    ``duration``; a longer stream advances one frame per step and holds its
    last frame. ``on_step(n, state, foa)`` is called after every PDE step.
    """
    if isinstance(frames, Frame):
        frames = [frames]
    frames = list(frames)
    if not frames:
        raise EmptyInput("no frames")
    grid = frames[0].grid
    tau = pde.tau
    n_steps = int(round(duration / tau))
    if n_steps < 1:
        raise ValueError(f"duration {duration} shorter than one time step {tau}")

    state = PotentialState.initial(grid, pde)
    inh = grid.zeros()
    foa = FoaState(initial_position(grid, dynamics))
    trajectory = []
    inh_max = []
    mu = grid.zeros()
    for n in range(n_steps):
        trajectory.append((n * tau, foa.pos))
        k = min(n, len(frames) - 1)
        prev = frames[k - 1] if 0 < n and k > 0 and k == n else None
        mu = compute_mass(frames[k], prev, inh, mass_params)
        state = step(state, mu, scheme, threads=threads)
        foa = step_foa(foa, state.phi_curr, dynamics, tau)
        inh = update_inhibition(inh, foa.pos, mass_params, tau)
        inh_max.append(float(inh.max()))
        if on_step is not None:
            on_step(n, state, foa)

    path = extract_fixations(trajectory, dynamics, stimulus=stimulus)
    path.seed = dynamics.seed
    path.model = model
    return SimulationResult(path, trajectory, state.phi_curr, mu, inh, inh_max, n_steps)


def accumulate_saliency(paths, grid, sigma_map):
    """Duration-weighted fixation histogram blurred by a Gaussian, normalized to sum 1."""
    paths = list(paths)
    if not paths or all(len(p) == 0 for p in paths):
        raise EmptyInput("no fixations to accumulate")
    hist = grid.zeros()
    for p in paths:
        for f in p.fixations:
            j = int(min(max(round(f.x), 0), grid.width - 1))
            i = int(min(max(round(f.y), 0), grid.height - 1))
            hist[i, j] += f.duration
    sal = gaussian_filter(hist, sigma=sigma_map, mode="constant", truncate=4.0)
    sal = np.maximum(sal, 0.0)
    return sal / sal.sum()
