"""Throughput of the explicit and implicit steppers across grid sizes and thread counts."""

from __future__ import annotations

import hashlib
import time
from dataclasses import replace

import numpy as np

from .grid import Grid
from .oracles import blob_mass
from .pde import EXPLICIT, IMPLICIT, PotentialState, stability_bound, step


def bench_mass(size, seed=0):
    rng = np.random.default_rng(seed)
    g = Grid(size, size)
    centers = rng.uniform(0.2 * size, 0.8 * size, (4, 2))
    return blob_mass(g, centers, radius=size / 16.0, amplitude=1000.0)


def checksum(a):
    return hashlib.sha256(np.ascontiguousarray(a).tobytes()).hexdigest()[:16]


def run_bench(pde, sizes=(64, 128, 256), threads=(1, 2, 4), steps=10):
    """Return a list of row dicts; the explicit scheme runs at half its stability bound
    when the configured step is too large for it."""
    rows = []
    for size in sizes:
        mass = bench_mass(size)
        grid = Grid(size, size)
        for scheme in (EXPLICIT, IMPLICIT):
            params = pde
            if scheme == EXPLICIT:
                params = replace(pde, tau=min(pde.tau, 0.5 * stability_bound(pde)))
            for n_threads in threads:
                state = PotentialState.initial(grid, params)
                t0 = time.perf_counter()
                for _ in range(steps):
                    state = step(state, mass, scheme, threads=n_threads)
                elapsed = time.perf_counter() - t0
                rows.append({
                    "size": size,
                    "scheme": scheme,
                    "threads": n_threads,
                    "tau": params.tau,
                    "steps": steps,
                    "seconds_per_step": elapsed / steps,
                    "steps_per_second": steps / elapsed if elapsed > 0 else float("inf"),
                    "checksum": checksum(state.phi_curr),
                })
    return rows


def checksums_agree(rows):
    seen = {}
    for r in rows:
        seen.setdefault((r["size"], r["scheme"]), set()).add(r["checksum"])
    return all(len(v) == 1 for v in seen.values())
