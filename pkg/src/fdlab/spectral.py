"""Fourier transforms of discrete measures on spherical shells and decay fits.

Convention: ``mu_hat(xi) = sum_j w_j exp(-i xi . x_j)`` with no 2*pi factor.
Decay exponents do not depend on the normalization; absolute values of
``sigma(R)`` do.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from ._util import as_points, fmt17, ordered_map, sphere_area
from .measures import DiscreteMeasure, sphere_nodes

# point-node pairs evaluated per block in the direct sum
BLOCK_PAIRS = 2_000_000
JACKKNIFE_GROUPS = 10
JACKKNIFE_MAX_SPREAD = 0.20


class QuadratureUnderflow(ValueError):
    """A nonpositive sigma was found inside a fitting window."""


@dataclass
class SphereQuadrature:
    d: int
    nodes: np.ndarray
    weights: np.ndarray
    scheme: str
    seed: int | None = None

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))


@dataclass
class DecayCurve:
    R: np.ndarray
    sigma: np.ndarray
    label: str = ""
    quadrature: str = ""
    spread: np.ndarray | None = None

    def __post_init__(self):
        self.R = np.asarray(self.R, dtype=float)
        self.sigma = np.asarray(self.sigma, dtype=float)
        if self.R.shape != self.sigma.shape:
            raise ValueError("R and sigma lengths differ")
        if len(self.R) > 1 and np.any(np.diff(self.R) <= 0):
            raise ValueError("R must be strictly increasing")

    def __len__(self) -> int:
        return len(self.R)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["R", "sigma"])
        for r, s in zip(self.R, self.sigma):
            w.writerow([fmt17(r), fmt17(s)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, label: str = "") -> "DecayCurve":
        rows = list(csv.reader(io.StringIO(text)))
        if rows[0] != ["R", "sigma"]:
            raise ValueError("expected header R,sigma")
        data = np.array([[float(a), float(b)] for a, b in rows[1:]])
        return cls(data[:, 0], data[:, 1], label)


@dataclass
class ExponentFit:
    beta: float
    stderr: float
    window: tuple
    residual: float
    intercept: float = field(default=0.0, repr=False)

    def to_json(self) -> str:
        return json.dumps({"beta": self.beta, "stderr": self.stderr,
                           "window": list(self.window), "residual": self.residual},
                          sort_keys=True)


def build_sphere_quadrature(d: int, n: int, seed: int = 0) -> SphereQuadrature:
    """Equal-weight quadrature on S^{d-1}.

    d=2 uses equal angles (the trapezoid rule, spectrally accurate), d=3 the
    Fibonacci spiral, d>=4 normalized Gaussian samples drawn with ``seed``.
    Weights are ``|S^{d-1}| / n``.
    """
    if d < 2 or n < 2:
        raise ValueError("need d >= 2 and n >= 2")
    nodes, scheme = sphere_nodes(d, n, seed)
    w = np.full(n, sphere_area(d) / n)
    return SphereQuadrature(d, nodes, w, scheme, seed if scheme == "monte-carlo" else None)


def fourier_transform_measure(mu: DiscreteMeasure, xi) -> np.ndarray | complex:
    """``sum_j w_j exp(-i xi . x_j)`` for one frequency or a stack of them."""
    xi_arr = np.asarray(xi, dtype=float)
    single = xi_arr.ndim == 1
    q = as_points(xi_arr, mu.d)
    step = max(1, BLOCK_PAIRS // max(1, len(mu)))
    out = np.empty(len(q), dtype=complex)
    for a in range(0, len(q), step):
        phase = q[a:a + step] @ mu.points.T
        # np.sum over the contiguous last axis uses pairwise summation
        out[a:a + step] = np.sum(mu.weights * np.exp(-1j * phase), axis=1)
    return complex(out[0]) if single else out


def _shell_values(mu: DiscreteMeasure, R: float, quad: SphereQuadrature) -> np.ndarray:
    if quad.d != mu.d:
        raise ValueError(f"quadrature dimension {quad.d} != measure dimension {mu.d}")
    if R < 0:
        raise ValueError("R must be nonnegative")
    return np.abs(fourier_transform_measure(mu, R * quad.nodes)) ** 2


def spherical_average(mu: DiscreteMeasure, R: float, quad: SphereQuadrature) -> float:
    """``sigma(R) = sum_q weight_q |mu_hat(R node_q)|^2``."""
    vals = _shell_values(mu, R, quad)
    return float(np.sum(quad.weights * vals))


def _jackknife_spread(weights: np.ndarray, vals: np.ndarray) -> float:
    groups = np.array_split(np.arange(len(vals)), JACKKNIFE_GROUPS)
    total_w = np.sum(weights)
    ests = []
    for g in groups:
        keep = np.ones(len(vals), dtype=bool)
        keep[g] = False
        ests.append(np.sum(weights[keep] * vals[keep]) * total_w / np.sum(weights[keep]))
    ests = np.asarray(ests)
    k = len(ests)
    return float(np.sqrt((k - 1) / k * np.sum((ests - ests.mean()) ** 2)))


def decay_scan(mu: DiscreteMeasure, R_grid, quad: SphereQuadrature) -> DecayCurve:
    """Evaluate sigma(R) along an increasing grid.

    For Monte Carlo quadratures a jackknife spread over 10 node groups is
    recorded alongside each value.
    """
    R_grid = np.asarray(R_grid, dtype=float)
    if len(R_grid) > 1 and np.any(np.diff(R_grid) <= 0):
        raise ValueError("R grid must be strictly increasing")
    shells = ordered_map(lambda r: _shell_values(mu, r, quad), R_grid)
    sigma = np.array([np.sum(quad.weights * v) for v in shells])
    spread = None
    if quad.scheme == "monte-carlo":
        spread = np.array([_jackknife_spread(quad.weights, v) for v in shells])
    return DecayCurve(R_grid, sigma, mu.label, quad.scheme, spread)


def fit_decay_exponent(curve: DecayCurve, window=None) -> ExponentFit:
    """Least-squares fit of ``log sigma = c - beta log R`` over ``window``.

    ``window`` is a ``(start, stop)`` index pair (stop exclusive); by default
    the whole curve is used.
    """
    start, stop = (0, len(curve)) if window is None else (int(window[0]), int(window[1]))
    R = curve.R[start:stop]
    s = curve.sigma[start:stop]
    if len(R) < 3:
        raise ValueError("fit window needs at least 3 points")
    if np.any(s <= 0):
        raise QuadratureUnderflow("nonpositive sigma inside the fit window")
    if curve.spread is not None:
        rel = curve.spread[start:stop] / s
        if np.any(rel > JACKKNIFE_MAX_SPREAD):
            raise ValueError(f"jackknife spread up to {rel.max():.2f} of sigma; refine the quadrature")
    x, y = np.log(R), np.log(s)
    res = stats.linregress(x, y)
    resid = y - (res.intercept + res.slope * x)
    return ExponentFit(float(-res.slope), float(res.stderr), (start, stop),
                       float(np.linalg.norm(resid)), float(res.intercept))


def jittered_dyadic_grid(r_min: float, r_max: float, seed: int = 0, jitter: float = 0.05,
                         accept=None, max_tries: int = 200) -> np.ndarray:
    """Dyadic points ``2^k`` in ``[r_min, r_max]`` with seeded multiplicative jitter.

    Each point is multiplied by ``1 + U(-jitter, jitter)``. When ``accept`` is
    given, jitters are redrawn until ``accept(R)`` holds, which keeps grid
    points away from known resonances (for example the zeros of a sinc).
    """
    rng = np.random.default_rng(seed)
    k0 = int(np.ceil(np.log2(r_min) - 1e-12))
    k1 = int(np.floor(np.log2(r_max) + 1e-12))
    out = []
    for k in range(k0, k1 + 1):
        for _ in range(max_tries):
            r = 2.0 ** k * (1.0 + rng.uniform(-jitter, jitter))
            if accept is None or accept(r):
                break
        else:
            raise RuntimeError(f"no admissible jitter found near 2^{k}")
        out.append(r)
    return np.array(out)


__all__ = [
    "SphereQuadrature", "DecayCurve", "ExponentFit", "QuadratureUnderflow",
    "build_sphere_quadrature", "fourier_transform_measure", "spherical_average",
    "decay_scan", "fit_decay_exponent", "jittered_dyadic_grid",
]
