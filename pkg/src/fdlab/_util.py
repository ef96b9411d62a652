"""Small numerical helpers shared across modules."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.special import gammaln
from scipy.stats import qmc


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere S^{d-1} in R^d."""
    return float(2.0 * np.exp(0.5 * d * np.log(np.pi) - gammaln(0.5 * d)))


def ball_volume(d: int) -> float:
    """Volume of the unit ball in R^d."""
    return float(np.exp(0.5 * d * np.log(np.pi) - gammaln(0.5 * d + 1.0)))


def n_workers() -> int:
    """Worker cap taken from ``FDL_THREADS`` (default 1)."""
    raw = os.environ.get("FDL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def ordered_map(func, items):
    """Map ``func`` over ``items`` with at most ``n_workers()`` threads.

    Results come back in input order, so any reduction done by the caller
    is independent of the worker count.
    """
    items = list(items)
    workers = min(n_workers(), len(items))
    if workers <= 1:
        return [func(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def ball_points(d: int, n: int) -> np.ndarray:
    """Deterministic quasi-uniform points in the closed unit ball of R^d.

    Uses the unscrambled Halton sequence on the cube and keeps the points
    that land inside the ball. For ``n == 1`` the single point is the centre.
    """
    if n == 1:
        return np.zeros((1, d))
    sampler = qmc.Halton(d=d, scramble=False)
    out = []
    have = 0
    # skip the first Halton point (the origin corner)
    sampler.fast_forward(1)
    while have < n:
        batch = 2.0 * sampler.random(max(64, 4 * n)) - 1.0
        inside = batch[np.einsum("ij,ij->i", batch, batch) <= 1.0]
        out.append(inside)
        have += len(inside)
    return np.concatenate(out)[:n]


def as_points(x, d: int | None = None) -> np.ndarray:
    """Coerce a vector or a stack of vectors to a 2-D float array."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if d is not None and arr.shape[-1] != d:
        raise ValueError(f"expected {d}-vectors, got shape {arr.shape}")
    return arr


def fmt17(x: float) -> str:
    """Format a real with 17 significant digits (round-trips a double)."""
    return format(float(x), ".17g")
