"""Truncated Schrodinger and half-wave propagators on frequency lattices.

Data are given by samples of ``f_hat`` on a lattice ``h Z^n``. The unitary
convention ``f_hat(xi) = (2 pi)^{-n/2} int f(x) exp(-i x.xi) dx`` is used, so
``||f||_2^2 = sum |f_hat|^2 h^n`` and the propagator with the cutoff
``psi(r) = (2 pi)^{-n/2} exp(-r^2)`` reproduces ``f`` at ``t = 0`` as the
cutoff radius grows.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from ._util import as_points
from .exponents import schrodinger_s0
from .measures import DiscreteMeasure, c_alpha_estimate, dyadic_radii

REFINE_TOL = 0.02


@dataclass
class FrequencyDatum:
    n: int
    nodes: np.ndarray
    values: np.ndarray
    h: float
    annulus: tuple | None = None

    def __post_init__(self):
        self.nodes = as_points(self.nodes, self.n)
        self.values = np.asarray(self.values, dtype=complex).ravel()
        if len(self.values) != len(self.nodes):
            raise ValueError("values and nodes differ in length")
        if self.annulus is not None:
            lo, hi = self.annulus
            r = self.radii
            live = self.values != 0
            if np.any(live & ((r <= lo) | (r >= hi))):
                raise ValueError("nonzero values outside the tagged annulus")

    @property
    def radii(self) -> np.ndarray:
        return np.linalg.norm(self.nodes, axis=1)

    def l2_norm(self) -> float:
        return float(math.sqrt(np.sum(np.abs(self.values) ** 2) * self.h ** self.n))

    def with_values(self, values) -> "FrequencyDatum":
        return FrequencyDatum(self.n, self.nodes, values, self.h, self.annulus)

    def origin_index(self):
        hits = np.flatnonzero(np.all(self.nodes == 0.0, axis=1))
        return int(hits[0]) if len(hits) else None


def frequency_lattice(n: int, h: float, radius: float) -> np.ndarray:
    """Nodes of ``h Z^n`` inside the closed ball of the given radius."""
    k = int(math.floor(radius / h))
    axis = h * np.arange(-k, k + 1)
    pts = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)
    return pts[np.einsum("ij,ij->i", pts, pts) <= radius ** 2 * (1 + 1e-12)]


def gaussian_datum(n: int, a: float, h: float = 0.05, radius: float | None = None,
                   center=None) -> FrequencyDatum:
    """``f_hat(xi) = exp(-a |xi - center|^2)`` on a lattice covering its numerical support."""
    c = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    rad = (math.sqrt(40.0 / a) + float(np.linalg.norm(c))) if radius is None else radius
    nodes = frequency_lattice(n, h, rad)
    d = nodes - c
    return FrequencyDatum(n, nodes, np.exp(-a * np.einsum("ij,ij->i", d, d)), h)


def gaussian_evolution(x, t: float, a: float, n: int, N: float = math.inf):
    """Closed form of the cut-off Schrodinger evolution of ``f_hat = exp(-a|xi|^2)``.

    The Gaussian cutoff adds ``1/N^2`` to ``a``; the result is
    ``(2 pi)^{-n/2} (pi / (a' - i t))^{n/2} exp(-|x|^2 / (4 (a' - i t)))``.
    """
    x = as_points(x, n)
    ae = a + (0.0 if math.isinf(N) else 1.0 / N ** 2)
    z = ae - 1j * t
    r2 = np.einsum("ij,ij->i", x, x)
    return (2 * math.pi) ** (-n / 2) * (math.pi / z) ** (n / 2) * np.exp(-r2 / (4 * z))


def cutoff(r, N: float, n: int):
    r = np.asarray(r, dtype=float)
    base = (2.0 * math.pi) ** (-n / 2.0)
    if math.isinf(N):
        return np.full_like(r, base)
    return base * np.exp(-(r / N) ** 2)


def truncated_propagator(f: FrequencyDatum, m: float, t, x, N: float = math.inf,
                         check_resolution: bool = True):
    """``S^{N,m}_t f(x) = int psi(|xi|/N) f_hat(xi) exp(i x.xi + i t |xi|^m) dxi``.

    ``x`` may be one point or a stack; ``t`` a scalar or an array matching
    the stack. The lattice Riemann sum approximates the integral only when
    ``h (|x| + m |t| max|xi|^{m-1}) < pi``; that condition is enforced unless
    ``check_resolution`` is False (exact evaluation of periodic data).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    xs = as_points(x, f.n)
    single = np.asarray(x).ndim == 1 and np.ndim(t) == 0
    tt = np.broadcast_to(np.asarray(t, dtype=float), (len(xs),))
    r = f.radii
    if check_resolution and len(r):
        rmax = float(r.max())
        worst = f.h * (np.max(np.linalg.norm(xs, axis=1)) + m * np.max(np.abs(tt)) * rmax ** (m - 1))
        if worst >= math.pi:
            raise ValueError(f"lattice too coarse to resolve the phase ({worst:.3g} >= pi)")
    coef = cutoff(r, N, f.n) * f.values * f.h ** f.n
    phase = xs @ f.nodes.T + np.outer(tt, r ** m)
    out = np.exp(1j * phase) @ coef
    return complex(out[0]) if single else out


def bessel_riesz_multiplier(f: FrequencyDatum, s: float, homogeneous: bool = False) -> FrequencyDatum:
    """Multiply by ``(1 + |xi|^2)^{-s/2}`` or, when ``homogeneous``, by ``|xi|^{-s}``."""
    r = f.radii
    if homogeneous:
        k = f.origin_index()
        if k is not None and f.values[k] != 0:
            raise ValueError("homogeneous symbol needs f_hat to vanish at the origin node")
        sym = np.ones_like(r)
        nz = r > 0
        sym[nz] = r[nz] ** (-s)
    else:
        sym = (1.0 + r ** 2) ** (-s / 2.0)
    return f.with_values(f.values * sym)


def wave_solution(v0: FrequencyDatum, v1: FrequencyDatum, t: float, x, N: float = math.inf,
                  check_resolution: bool = True):
    """``v = e^{it|D|} f_+ + e^{-it|D|} f_-`` with ``f_pm_hat = (v0_hat -+ i v1_hat/|xi|)/2``."""
    if v0.nodes.shape != v1.nodes.shape or not np.array_equal(v0.nodes, v1.nodes):
        raise ValueError("v0 and v1 must share a lattice")
    k = v1.origin_index()
    if k is not None and v1.values[k] != 0:
        raise ValueError("v1 must vanish at the origin node")
    r = v0.radii
    inv = np.zeros_like(r)
    inv[r > 0] = 1.0 / r[r > 0]
    fp = v0.with_values(0.5 * (v0.values - 1j * inv * v1.values))
    fm = v0.with_values(0.5 * (v0.values + 1j * inv * v1.values))
    return (truncated_propagator(fp, 1, t, x, N, check_resolution)
            + truncated_propagator(fm, 1, -t, x, N, check_resolution))


def maximal_function(f: FrequencyDatum, m: float, x, t_grid, N_grid=(math.inf,),
                     check_resolution: bool = True):
    """``max`` over the finite grids of ``|S^{N,m}_t f(x)|``: a lower bound for the true sup."""
    t_grid = list(np.atleast_1d(t_grid))
    N_grid = list(np.atleast_1d(N_grid))
    if not t_grid or not N_grid:
        raise ValueError("grids must be nonempty")
    xs = as_points(x, f.n)
    best = np.zeros(len(xs))
    for N in N_grid:
        for t in t_grid:
            best = np.maximum(best, np.abs(truncated_propagator(f, m, t, xs, N, check_resolution)))
    return float(best[0]) if np.asarray(x).ndim == 1 else best


# ---------------------------------------------------------------------------
# maximal estimates against fractal measures
# ---------------------------------------------------------------------------


def annulus_datum(n: int, R: float, rng, h: float = 1.0) -> FrequencyDatum:
    """Complex Gaussian coefficients on ``h Z^n`` in ``R/8 < |xi| < R/2``, with ``||f||_2 = 1``."""
    nodes = frequency_lattice(n, h, R / 2.0)
    r = np.linalg.norm(nodes, axis=1)
    nodes = nodes[(r > R / 8.0) & (r < R / 2.0)]
    if len(nodes) == 0:
        raise ValueError("annulus contains no lattice nodes")
    c = rng.standard_normal(len(nodes)) + 1j * rng.standard_normal(len(nodes))
    f = FrequencyDatum(n, nodes, c, h, annulus=(R / 8.0, R / 2.0))
    return f.with_values(c / f.l2_norm())


def sup_in_time_integer_lattice(f: FrequencyDatum, x, t_max: float = 1.0, oversample: int = 8,
                                chunk: int = 32) -> np.ndarray:
    """``max_{t in [0, t_max]} |S_t f(x)|`` for Schrodinger data on the integer lattice.

    With integer nodes, ``|xi|^2`` is an integer and ``t -> S_t f(x)`` is a
    2 pi-periodic trigonometric polynomial of degree ``D = max |xi|^2``.
    An FFT of length ``oversample * 2 D`` evaluates it at every grid time,
    with phase steps of at most ``pi / oversample`` between samples.
    """
    if f.h != 1.0 or not np.all(f.nodes == np.rint(f.nodes)):
        raise ValueError("needs data on the integer lattice")
    xs = as_points(x, f.n)
    k = np.rint(np.einsum("ij,ij->i", f.nodes, f.nodes)).astype(np.int64)
    D = int(k.max())
    M = 1 << int(math.ceil(math.log2(max(2, oversample * 2 * D))))
    keep = int(math.floor(t_max / (2 * math.pi) * M)) + 1
    coef = cutoff(f.radii, math.inf, f.n) * f.values
    out = np.empty(len(xs))
    for a in range(0, len(xs), chunk):
        amp = np.exp(1j * xs[a:a + chunk] @ f.nodes.T) * coef  # (P, modes)
        spec = np.zeros((len(amp), M), dtype=complex)
        for j in range(len(k)):
            spec[:, k[j]] += amp[:, j]
        # sum_j amp_j exp(i t_l k_j) with t_l = 2 pi l / M
        vals = np.fft.ifft(spec, axis=1)[:, :keep] * M
        out[a:a + chunk] = np.max(np.abs(vals), axis=1)
    return out


def sup_in_time_refined(f: FrequencyDatum, x, t_max: float = 1.0, start: int = 4, limit: int = 64):
    """Double the time oversampling until the L^2 size of the sup changes by < 2%."""
    q = start
    prev = sup_in_time_integer_lattice(f, x, t_max, q)
    while q < limit:
        q *= 2
        cur = sup_in_time_integer_lattice(f, x, t_max, q)
        if abs(np.linalg.norm(cur) - np.linalg.norm(prev)) <= REFINE_TOL * np.linalg.norm(prev):
            return cur, q
        prev = cur
    return prev, q


@dataclass
class MaximalScanResult:
    n: int
    alpha: float
    R: list
    norms: list
    slope: float
    stderr: float
    s0: float
    s0_branch: str
    seeds: list = field(default_factory=list)
    per_seed: list = field(default_factory=list, repr=False)

    def to_json(self) -> str:
        d = {k: v for k, v in self.__dict__.items() if k != "per_seed"}
        return json.dumps(d, sort_keys=True, indent=2)


def maximal_scaling_fit(n: int, mu: DiscreteMeasure, alpha: float, R_list, seeds=(0,),
                        t_max: float = 1.0) -> MaximalScanResult:
    """Growth of ``||sup_{0<t<1} |S_t f|||_{L^2(mu)}`` with the frequency scale R.

    For each R, random annulus data with unit L^2 norm are drawn per seed;
    the norm is averaged over seeds and the log-log slope against R is fitted.
    Data live on the integer lattice and are evaluated as periodic
    trigonometric sums, so no spatial resolution limit applies.
    """
    if n not in (1, 2):
        raise ValueError("desk-scale runs support n = 1 or 2")
    R_list = [float(r) for r in R_list]
    if not R_list:
        raise ValueError("R_list must be nonempty")
    if mu.d != n:
        raise ValueError("measure dimension must equal n")
    seeds = list(seeds)
    per_seed = []
    for R in R_list:
        row = []
        for s in seeds:
            rng = np.random.default_rng([int(s), int(R)])
            f = annulus_datum(n, R, rng)
            sup, _ = sup_in_time_refined(f, mu.points, t_max)
            row.append(float(math.sqrt(np.sum(mu.weights * sup ** 2))))
        per_seed.append(row)
    norms = [float(np.mean(r)) for r in per_seed]
    if len(R_list) >= 2:
        fit = stats.linregress(np.log(R_list), np.log(norms))
        slope, err = float(fit.slope), float(fit.stderr)
    else:
        slope, err = float("nan"), float("nan")
    ref = schrodinger_s0(n, alpha)
    return MaximalScanResult(n, float(alpha), R_list, norms, slope, err, ref.value, ref.provenance,
                             seeds, per_seed)


# ---------------------------------------------------------------------------
# polar-coordinate majorization
# ---------------------------------------------------------------------------


@dataclass
class PolarCheck:
    lhs: float
    rhs: float
    ratio: float
    c_alpha: float
    shells: int


def shell_norms(f: FrequencyDatum, width: float):
    """Radii and ``||f_hat(R .)||_{L^2(S^{n-1})}`` from lattice data binned in shells."""
    r = f.radii
    live = np.abs(f.values) > 0
    if not np.any(live):
        raise ValueError("f_hat vanishes")
    edges = np.arange(0.0, r[live].max() + width, width)
    idx = np.digitize(r, edges) - 1
    R_mid, vals = [], []
    for b in np.unique(idx[live]):
        sel = idx == b
        Rm = edges[b] + width / 2
        energy = np.sum(np.abs(f.values[sel]) ** 2) * f.h ** f.n
        # energy = int_shell |f_hat|^2 ~ R^{n-1} width ||f_hat(R.)||^2
        R_mid.append(Rm)
        vals.append(math.sqrt(energy / (Rm ** (f.n - 1) * width)))
    return np.array(R_mid), np.array(vals)


def polar_majorization_check(f: FrequencyDatum, s: float, mu: DiscreteMeasure, beta: float,
                             shell_width: float | None = None, m: float = 1,
                             t_grid=None, N_grid=(math.inf,), alpha: float | None = None,
                             check_resolution: bool = True) -> PolarCheck:
    """Both sides of the polar-coordinate bound for the maximal operator.

    ``lhs = || sup_{t,N} |S^{N,m}_t I_s f| ||_{L^1(mu)}`` on grids and
    ``rhs = sqrt(c_alpha ||mu||) int R^{n-1-s} (1+R)^{-beta/2} ||f_hat(R .)|| dR``
    with the radial integral taken over lattice shells. The constant is
    left at one; the ratio is a diagnostic.
    """
    if not np.any(f.values):
        raise ValueError("f_hat vanishes")
    if f.annulus is None and not np.all(np.isfinite(f.values)):
        raise ValueError("f_hat must be finite")
    width = shell_width if shell_width is not None else 2.0 * f.h
    a = alpha if alpha is not None else float(mu.meta.get("nominal_alpha", mu.d))
    g = bessel_riesz_multiplier(f, s, homogeneous=True)
    tg = np.linspace(0.0, 1.0, 33) if t_grid is None else t_grid
    sup = maximal_function(g, m, mu.points, tg, N_grid, check_resolution)
    lhs = float(np.sum(mu.weights * sup))
    ca = c_alpha_estimate(mu, a, dyadic_radii(1e-3, 2.0), max_centers=512).value
    Rm, nrm = shell_norms(f, width)
    integrand = Rm ** (f.n - 1 - s) * (1.0 + Rm) ** (-beta / 2.0) * nrm
    rhs = math.sqrt(ca * mu.mass) * float(np.sum(integrand) * width)
    return PolarCheck(lhs, rhs, lhs / rhs, ca, len(Rm))


__all__ = [
    "FrequencyDatum", "MaximalScanResult", "PolarCheck", "frequency_lattice", "gaussian_datum",
    "gaussian_evolution", "truncated_propagator", "bessel_riesz_multiplier", "wave_solution",
    "maximal_function", "annulus_datum", "sup_in_time_integer_lattice", "sup_in_time_refined",
    "maximal_scaling_fit", "shell_norms", "polar_majorization_check", "cutoff",
]
