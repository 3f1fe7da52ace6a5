"""Run configuration: flat JSON keys, model presets, resolution of defaults."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

from .errors import ConfigError
from .foa import DynamicsParams
from .grid import Grid
from .mass import MassParams
from .metrics import EvalConfig
from .pde import PRESETS, SCHEMES, PdeParams

# JSON key -> dataclass field where they differ
_ALIASES = {"lambda": "lam"}


@dataclass(frozen=True)
class RunConfig:
    model: str = "DW"
    m: Optional[float] = None
    d: Optional[float] = None
    c: Optional[float] = None
    tau: Optional[float] = None
    alpha1: float = 1.0
    alpha2: float = 1.0
    k: float = 250000.0
    beta: float = 10.0
    sigma: Optional[float] = None
    gamma: float = 0.1
    normalize_mass: bool = False
    lam: float = 5.0
    v_fix: float = 50.0
    t_fix: float = 0.1
    jitter: Optional[float] = None
    duration: float = 5.0
    n_scanpaths: int = 5
    seed: int = 0
    scheme: str = "implicit"
    out: str = "out"
    snapshots: int = 0
    threads: int = 1
    regions_rows: int = 5
    regions_cols: int = 5
    stde_k: int = 2
    sigma_map: Optional[float] = None
    verify_grid: Optional[int] = None
    bench_sizes: tuple = (64, 128, 256)
    bench_threads: tuple = (1, 2, 4)
    bench_steps: int = 10

    def __post_init__(self):
        if self.model not in ("H", "DW", "custom"):
            raise ConfigError(f"model must be H, DW or custom, got {self.model!r}")
        if self.model == "custom" and (self.m is None or self.d is None):
            raise ConfigError("custom model needs explicit m and d")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.n_scanpaths < 1 or self.threads < 1 or self.snapshots < 0:
            raise ConfigError("n_scanpaths and threads must be >= 1, snapshots >= 0")
        if self.duration <= 0:
            raise ConfigError("duration must be positive")

    @classmethod
    def from_dict(cls, doc):
        names = {f.name for f in fields(cls)}
        kwargs = {}
        for key, value in doc.items():
            name = _ALIASES.get(key, key)
            if name not in names or key in _ALIASES.values():
                raise ConfigError(f"unknown config key {key!r}")
            if name in ("bench_sizes", "bench_threads"):
                value = tuple(value)
            kwargs[name] = value
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path):
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError(f"{path}: top level must be an object")
        return cls.from_dict(doc)

    def override(self, **changes):
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, **changes) if changes else self

    def resolved(self):
        """Copy with preset PDE values filled in."""
        base = PRESETS.get(self.model, PRESETS["DW"])
        return replace(
            self,
            m=self.m if self.m is not None else base.m,
            d=self.d if self.d is not None else base.d,
            c=self.c if self.c is not None else base.c,
            tau=self.tau if self.tau is not None else base.tau,
        )

    def as_dict(self):
        r = self.resolved()
        out = {}
        for f in fields(r):
            key = {v: k for k, v in _ALIASES.items()}.get(f.name, f.name)
            value = getattr(r, f.name)
            out[key] = list(value) if isinstance(value, tuple) else value
        return out

    def pde_params(self):
        r = self.resolved()
        return PdeParams(m=r.m, d=r.d, c=r.c, tau=r.tau)

    def mass_params(self):
        return MassParams(alpha1=self.alpha1, alpha2=self.alpha2, k=self.k, beta=self.beta,
                          sigma=self.sigma, gamma=self.gamma, normalize=self.normalize_mass)

    def dynamics_params(self, seed=None):
        return DynamicsParams(lam=self.lam, v_fix=self.v_fix, t_fix=self.t_fix,
                              jitter=self.jitter, seed=self.seed if seed is None else seed)

    def eval_config(self, grid: Grid):
        return EvalConfig(grid, (self.regions_rows, self.regions_cols), self.stde_k,
                          self.sigma_map)
