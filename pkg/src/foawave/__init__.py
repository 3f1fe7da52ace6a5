"""Focus-of-attention scanpaths driven by a damped-wave potential field."""

from .errors import FoaError
from .foa import DynamicsParams, Fixation, Scanpath, simulate
from .grid import Grid, Vec2
from .mass import Frame, MassParams, compute_mass
from .pde import DW_PRESET, H_PRESET, PdeParams, PotentialState, evolve, step

__version__ = "0.1.0"

__all__ = [
    "DW_PRESET", "DynamicsParams", "Fixation", "FoaError", "Frame", "Grid", "H_PRESET",
    "MassParams", "PdeParams", "PotentialState", "Scanpath", "Vec2", "compute_mass", "evolve",
    "simulate", "step",
]
