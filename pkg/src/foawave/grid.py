"""Discrete retina: grid geometry, 5-point stencil and interpolation.

Fields are plain ``numpy`` arrays of shape ``(height, width)`` stored
row-major, indexed ``f[i, j]`` with ``i`` the row (y) and ``j`` the column
(x). Points crossing the API are always given as ``(x, y)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import GridMismatch, OutOfDomain


class Vec2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Grid:
    width: int
    height: int
    spacing: float = 1.0

    def __post_init__(self):
        if self.width < 3 or self.height < 3:
            raise ValueError(f"grid must be at least 3x3, got {self.width}x{self.height}")
        if self.spacing != 1.0:
            raise ValueError("only unit pixel spacing is supported")

    @property
    def shape(self):
        return (self.height, self.width)

    @property
    def diagonal(self):
        return math.hypot(self.width - 1, self.height - 1)

    @property
    def center(self):
        return Vec2((self.width - 1) / 2.0, (self.height - 1) / 2.0)

    @classmethod
    def of(cls, field):
        h, w = np.shape(field)
        return cls(width=int(w), height=int(h))

    def zeros(self):
        return np.zeros(self.shape)

    def contains(self, p, margin=0.0):
        return (margin <= p[0] <= self.width - 1 - margin
                and margin <= p[1] <= self.height - 1 - margin)


def check_same_grid(*fields):
    shape = np.shape(fields[0])
    for f in fields[1:]:
        if np.shape(f) != shape:
            raise GridMismatch(f"field shapes differ: {shape} vs {np.shape(f)}")


@lru_cache(maxsize=None)
def _executor(threads):
    return ThreadPoolExecutor(max_workers=threads, thread_name_prefix="foawave")


def row_blocks(n_rows, threads):
    """Split interior rows ``1 .. n_rows-2`` into ``threads`` contiguous blocks."""
    interior = n_rows - 2
    threads = max(1, min(threads, interior))
    edges = np.linspace(1, n_rows - 1, threads + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def parallel_rows(kernel, n_rows, threads):
    """Run ``kernel(r0, r1)`` over interior row blocks, possibly on a thread pool.

    Kernels must write disjoint output rows; each element is computed by the
    same expression whatever the partition, so results are bit-identical.
    """
    blocks = row_blocks(n_rows, threads)
    if threads <= 1 or len(blocks) == 1:
        for r0, r1 in blocks:
            kernel(r0, r1)
        return
    futures = [_executor(threads).submit(kernel, r0, r1) for r0, r1 in blocks]
    for fut in futures:
        fut.result()


def laplacian_5pt(f, threads=1, out=None):
    """Five-point Laplacian with unit spacing; the boundary ring of the result is 0."""
    f = np.asarray(f, dtype=float)
    if out is None:
        out = np.zeros_like(f)
    else:
        out[0, :] = 0.0
        out[-1, :] = 0.0
        out[:, 0] = 0.0
        out[:, -1] = 0.0

    def kernel(r0, r1):
        out[r0:r1, 1:-1] = (f[r0:r1, 2:] + f[r0:r1, :-2]
                            + f[r0 + 1:r1 + 1, 1:-1] + f[r0 - 1:r1 - 1, 1:-1]
                            - 4.0 * f[r0:r1, 1:-1])

    parallel_rows(kernel, f.shape[0], threads)
    return out


def apply_dirichlet(f):
    """Return a copy of ``f`` with its boundary ring set to zero."""
    g = np.array(f, dtype=float, copy=True)
    g[0, :] = 0.0
    g[-1, :] = 0.0
    g[:, 0] = 0.0
    g[:, -1] = 0.0
    return g


def _cell(f, p):
    h, w = f.shape
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)) or not (0.0 <= x <= w - 1 and 0.0 <= y <= h - 1):
        raise OutOfDomain(f"point ({x}, {y}) outside retina {w}x{h}")
    j0 = min(int(math.floor(x)), w - 2)
    i0 = min(int(math.floor(y)), h - 2)
    return i0, j0, x - j0, y - i0


def bilinear_sample(f, p):
    """Bilinear interpolation of ``f`` at ``p = (x, y)``."""
    f = np.asarray(f, dtype=float)
    i0, j0, fx, fy = _cell(f, p)
    top = f[i0, j0] * (1.0 - fx) + f[i0, j0 + 1] * fx
    bottom = f[i0 + 1, j0] * (1.0 - fx) + f[i0 + 1, j0 + 1] * fx
    return float(top * (1.0 - fy) + bottom * fy)


def gradient_fields(f):
    """Central-difference ``(d/dx, d/dy)`` fields, one-sided on the boundary ring."""
    gy, gx = np.gradient(np.asarray(f, dtype=float))
    return gx, gy


def gradient_at(f, p):
    """Gradient of ``f`` at ``p``, bilinearly interpolated from nodal central differences.

    ``p`` must lie at least one pixel away from the boundary.
    """
    f = np.asarray(f, dtype=float)
    h, w = f.shape
    if not (1.0 <= p[0] <= w - 2 and 1.0 <= p[1] <= h - 2):
        raise OutOfDomain(f"gradient needs an interior point, got ({p[0]}, {p[1]})")
    i0, j0, fx, fy = _cell(f, p)
    # only the 2x2 patch of nodes is needed; its central differences read a 4x4 window
    gx = np.empty((2, 2))
    gy = np.empty((2, 2))
    for di in (0, 1):
        for dj in (0, 1):
            i, j = i0 + di, j0 + dj
            gx[di, dj] = _diff(f[i, :], j)
            gy[di, dj] = _diff(f[:, j], i)
    wts = np.array([[(1 - fx) * (1 - fy), fx * (1 - fy)], [(1 - fx) * fy, fx * fy]])
    return Vec2(float((gx * wts).sum()), float((gy * wts).sum()))


def _diff(line, k):
    if k == 0:
        return line[1] - line[0]
    if k == len(line) - 1:
        return line[k] - line[k - 1]
    return 0.5 * (line[k + 1] - line[k - 1])
