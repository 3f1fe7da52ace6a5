"""Saliency (AUC-Judd, NSS) and scanpath (SED, STDE) scores."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import DegenerateMap, EmptyFixations, EmptyInput, PathTooShort
from .foa import accumulate_saliency
from .grid import Grid, bilinear_sample


def _points(fix):
    pts = fix.points() if hasattr(fix, "points") else np.asarray(fix, dtype=float)
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise EmptyFixations("no fixations")
    return pts


def nss(sal, fix):
    """Normalized scanpath saliency: mean z-score of ``sal`` at the fixation points.

    Uses the population standard deviation; points are sampled bilinearly.
    """
    sal = np.asarray(sal, dtype=float)
    pts = _points(fix)
    mean = sal.mean()
    std = sal.std()
    if std == 0:
        raise DegenerateMap("saliency map is constant")
    vals = [bilinear_sample(sal, p) for p in pts]
    return float((np.mean(vals) - mean) / std)


def fixated_mask(shape, fix):
    pts = _points(fix)
    h, w = shape
    mask = np.zeros(shape, dtype=bool)
    j = np.clip(np.rint(pts[:, 0]), 0, w - 1).astype(int)
    i = np.clip(np.rint(pts[:, 1]), 0, h - 1).astype(int)
    mask[i, j] = True
    return mask


def auc_judd(sal, fix):
    """Area under the ROC curve with thresholds at the saliency of fixated pixels.

    Positives are the fixated pixels, negatives every other pixel. The
    curve is integrated with the trapezoid rule, so ties count half.
    """
    sal = np.asarray(sal, dtype=float)
    mask = fixated_mask(sal.shape, fix)
    pos = np.sort(sal[mask])
    neg = np.sort(sal[~mask])
    if len(neg) == 0:
        raise DegenerateMap("every pixel is fixated")
    thresholds = np.unique(pos)[::-1]
    # counts of values >= threshold via sorted search
    tp = (len(pos) - np.searchsorted(pos, thresholds, side="left")) / len(pos)
    fp = (len(neg) - np.searchsorted(neg, thresholds, side="left")) / len(neg)
    tp = np.concatenate(([0.0], tp, [1.0]))
    fp = np.concatenate(([0.0], fp, [1.0]))
    return float(np.sum((fp[1:] - fp[:-1]) * (tp[1:] + tp[:-1]) / 2.0))


def region_string(path, grid, regions=(5, 5)):
    rows, cols = regions
    if rows < 1 or cols < 1:
        raise ValueError("region grid must be at least 1x1")
    out = []
    for x, y in path.points() if hasattr(path, "points") else path:
        c = min(max(int(x * cols / grid.width), 0), cols - 1)
        r = min(max(int(y * rows / grid.height), 0), rows - 1)
        out.append(r * cols + c)
    return out


def levenshtein(a, b):
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def sed(a, b, grid, regions=(5, 5)):
    """String edit distance between region-quantized fixation sequences."""
    return levenshtein(region_string(a, grid, regions), region_string(b, grid, regions))


def _embed(pts, k, diag):
    n = len(pts) - k + 1
    return np.stack([pts[i:i + k] for i in range(n)]) / diag  # (n, k, 2)


def _directed_stde(ea, eb):
    # tuple distance: mean over the k positions of the Euclidean gap
    d = np.linalg.norm(ea[:, None, :, :] - eb[None, :, :, :], axis=-1).mean(axis=-1)
    return float(np.mean(np.exp(-d.min(axis=1))))


def stde(a, b, grid, k=2):
    """Scaled time-delay embedding similarity in ``(0, 1]``.

    Both paths are cut into all runs of ``k`` consecutive fixations, scaled
    by the retina diagonal. Each run is scored ``exp(-distance to the
    closest run of the other path)``; the two directed means are averaged.
    """
    pa, pb = a.points(), b.points()
    if k < 1 or len(pa) < k or len(pb) < k:
        raise PathTooShort(f"need at least k={k} fixations, got {len(pa)} and {len(pb)}")
    diag = grid.diagonal
    if not diag > 0:
        raise ValueError("retina diagonal must be positive")
    ea, eb = _embed(pa, k, diag), _embed(pb, k, diag)
    return 0.5 * (_directed_stde(ea, eb) + _directed_stde(eb, ea))


@dataclass(frozen=True)
class EvalConfig:
    grid: Grid
    regions: Tuple[int, int] = (5, 5)
    stde_k: int = 2
    sigma_map: Optional[float] = None  # px; None means width/32

    def sigma_for(self):
        return self.sigma_map if self.sigma_map is not None else self.grid.width / 32.0


@dataclass
class MetricReport:
    auc: float
    nss: float
    sed_mean: float
    sed_best: float
    stde_mean: float
    stde_best: float

    def as_dict(self):
        return asdict(self)


def pair_stde(a, b, grid, k):
    """STDE with the embedding shortened to fit short paths; 0 if either is empty."""
    k_eff = min(k, len(a), len(b))
    if k_eff < 1:
        return 0.0
    return stde(a, b, grid, k_eff)


def aggregate(model_paths, human_paths, cfg, saliency=None):
    """Scores of model scanpaths against human scanpaths for one stimulus.

    SED/STDE are computed for every (model, human) pair; ``*_mean`` is the
    mean over pairs, ``sed_best`` the minimum and ``stde_best`` the maximum.
    AUC and NSS score ``saliency`` (default: the map accumulated from the
    model scanpaths) against the pooled human fixations.
    """
    model_paths, human_paths = list(model_paths), list(human_paths)
    if not model_paths or not human_paths:
        raise EmptyInput("need at least one model and one human scanpath")
    grid = cfg.grid
    seds, stdes = [], []
    for m in model_paths:
        for h in human_paths:
            seds.append(sed(m, h, grid, cfg.regions))
            stdes.append(pair_stde(m, h, grid, cfg.stde_k))

    pooled = np.concatenate([h.points() for h in human_paths])
    auc = nss_val = math.nan
    if len(pooled):
        try:
            if saliency is None:
                saliency = accumulate_saliency(model_paths, grid, cfg.sigma_for())
            auc = auc_judd(saliency, pooled)
            nss_val = nss(saliency, pooled)
        except (EmptyInput, DegenerateMap):
            pass
    return MetricReport(
        auc=auc,
        nss=nss_val,
        sed_mean=float(np.mean(seds)),
        sed_best=float(np.min(seds)),
        stde_mean=float(np.mean(stdes)),
        stde_best=float(np.max(stdes)),
    )
