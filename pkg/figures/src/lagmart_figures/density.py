"""Gaussian-kernel KDE with Silverman bandwidth.

Mirrors the study engine's estimator formula exactly (same bandwidth rule,
same kernel arithmetic) so densities plotted here coincide with densities the
engine computes at shared grid points.
"""

from __future__ import annotations

import math

import numpy as np


def silverman_bandwidth(samples) -> float:
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < 2:
        raise ValueError("need at least two observations")
    sd = float(x.std(ddof=1))
    if sd == 0.0:
        raise ValueError("degenerate sample (zero variance)")
    q75, q25 = np.percentile(x, [75.0, 25.0])
    iqr = float(q75 - q25)
    scale = min(sd, iqr / 1.34) if iqr > 0.0 else sd
    return 0.9 * scale * n ** (-0.2)


def kde(samples, grid, bandwidth: float | None = None) -> np.ndarray:
    x = np.asarray(samples, dtype=float)
    g = np.asarray(grid, dtype=float)
    if g.size == 0:
        raise ValueError("empty grid")
    if x.size < 2:
        raise ValueError("need at least two observations")
    h = silverman_bandwidth(x) if bandwidth is None else float(bandwidth)
    if h <= 0.0:
        raise ValueError("bandwidth must be positive")
    out = np.empty(g.size)
    norm = 1.0 / (x.size * h * math.sqrt(2.0 * math.pi))
    chunk = max(1, int(2_000_000 // max(1, x.size)))
    for i in range(0, g.size, chunk):
        zz = (g[i : i + chunk, None] - x[None, :]) / h
        out[i : i + chunk] = norm * np.exp(-0.5 * zz * zz).sum(axis=1)
    return out


def density_grid(samples, points: int = 512, pad_bandwidths: float = 3.0) -> np.ndarray:
    """Evaluation grid covering the sample plus a few bandwidths of margin."""
    x = np.asarray(samples, dtype=float)
    h = silverman_bandwidth(x)
    lo = float(x.min()) - pad_bandwidths * h
    hi = float(x.max()) + pad_bandwidths * h
    return np.linspace(lo, hi, points)


def gaussian_pdf(grid, mean: float, sd: float) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if sd <= 0.0:
        raise ValueError("sd must be positive")
    z = (g - mean) / sd
    return np.exp(-0.5 * z * z) / (sd * math.sqrt(2.0 * math.pi))
