"""Knapp-type counterexample built from integer points on spheres.

Directions ``omega = l / n`` with ``l`` in Z^d and ``|l|^2 = n^2`` satisfy
``R^kappa omega in 2 pi Z^d`` once ``R = (2 pi n)^{1/kappa}``. Thin caps
around them, tested against a lattice of small balls, keep the phase of
the extension integral near ``2 pi Z``. This forces an upper bound on the
decay exponent.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats
from scipy.linalg import null_space
from scipy.special import betainc

from ._util import ball_points, ball_volume, fmt17, ordered_map, sphere_area
from .measures import c_alpha_estimate, dyadic_radii, make_lattice_measure

ENUM_BUDGET = 1_000_000
PHASE_WINDOW = 0.1


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class SphereLatticeSet:
    d: int
    n2: int
    vectors: np.ndarray  # int64, shape (count, d), lexicographic

    def __len__(self) -> int:
        return len(self.vectors)

    def directions(self) -> np.ndarray:
        return self.vectors / math.sqrt(self.n2)


def sum_of_squares_points(d: int, n2: int, budget: int = ENUM_BUDGET) -> SphereLatticeSet:
    """Every ``v`` in Z^d with ``|v|^2 = n2``, by exhaustive recursion.

    ``budget`` caps the number of visited prefixes.
    """
    if d < 1 or n2 < 0:
        raise ValueError("need d >= 1 and n2 >= 0")
    out: list[tuple] = []
    visited = 0

    def rec(prefix: list, remaining: int, k: int):
        nonlocal visited
        visited += 1
        if visited > budget:
            raise BudgetExceeded(f"enumeration budget of {budget} prefixes exceeded")
        if k == 1:
            r = math.isqrt(remaining)
            if r * r == remaining:
                if r == 0:
                    out.append(tuple(prefix + [0]))
                else:
                    out.append(tuple(prefix + [-r]))
                    out.append(tuple(prefix + [r]))
            return
        top = math.isqrt(remaining)
        for a in range(-top, top + 1):
            rec(prefix + [a], remaining - a * a, k - 1)

    rec([], n2, d)
    vecs = np.array(out, dtype=np.int64).reshape(-1, d)
    return SphereLatticeSet(d, n2, vecs)


def jacobi_r4(n: int) -> int:
    """r_4(n) = 8 * sum of the divisors of n not divisible by 4 (n >= 1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 8 * sum(m for m in range(1, n + 1) if n % m == 0 and m % 4)


def gamma_count_check(d: int, n_list, kappa: float = 0.5) -> list:
    """Rows ``(n, count, (2 pi n)^{d-2}, ratio)`` comparing #Gamma to R^{kappa(d-2)}.

    With ``R^kappa = 2 pi n`` the comparison value does not depend on kappa;
    the argument is kept only for labelling.
    """
    if d < 4:
        raise ValueError("the count lower bound is only used for d >= 4")
    rows = []
    for n in n_list:
        count = len(sum_of_squares_points(d, int(n) ** 2))
        ref = (2.0 * math.pi * n) ** (d - 2)
        rows.append((int(n), count, ref, count / ref))
    return rows


# ---------------------------------------------------------------------------
# the phase argument
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhaseTerms:
    I1: float
    I2: float
    I3: float
    I4: float
    winding: int  # I1 = 2 pi * winding, exact

    @property
    def total(self) -> float:
        return self.I1 + self.I2 + self.I3 + self.I4

    def residual(self) -> float:
        """``I2 + I3 + I4``, the offset of the phase from 2 pi Z when it is small."""
        return self.I2 + self.I3 + self.I4


def phase_decomposition(ell, v, m, u, R: float, kappa: float,
                        rho: float | None = None, eps: float | None = None) -> PhaseTerms:
    """Split ``omega . R x`` for ``omega = l/n + v`` and ``x = R^{kappa-1} m + u``.

    The four terms are ``2 pi l.m``, ``R^kappa v.m``, ``2 pi R^{1-kappa} l.u``
    and ``R v.u``. When ``rho`` and ``eps`` are given, the size conditions
    ``|v| < rho/R`` and ``|u| < eps/R`` are enforced.
    """
    ell = np.asarray(ell, dtype=np.int64)
    m = np.asarray(m, dtype=np.int64)
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    n_int = int(ell @ ell)
    if abs(math.sqrt(n_int) - R ** kappa / (2.0 * math.pi)) > 1e-9 * max(1.0, math.sqrt(n_int)):
        raise ValueError("|l| must equal R^kappa / (2 pi)")
    if float(np.sqrt(m @ m)) >= R ** (1.0 - kappa):
        raise ValueError("|m| must be < R^(1-kappa)")
    if rho is not None and float(np.linalg.norm(v)) >= rho / R:
        raise ValueError("|v| must be < rho / R")
    if eps is not None and float(np.linalg.norm(u)) >= eps / R:
        raise ValueError("|u| must be < eps / R")
    k = int(ell @ m)
    return PhaseTerms(
        I1=2.0 * math.pi * k,
        I2=float(R ** kappa * (v @ m)),
        I3=float(2.0 * math.pi * R ** (1.0 - kappa) * (ell @ u)),
        I4=float(R * (v @ u)),
        winding=k,
    )


def wrap_phase(p):
    """Representative of ``p`` modulo 2 pi in [-pi, pi)."""
    return (np.asarray(p) + np.pi) % (2.0 * np.pi) - np.pi


# ---------------------------------------------------------------------------
# caps around Gamma
# ---------------------------------------------------------------------------


def chordal_cap_area(d: int, chord: float) -> float:
    """Surface measure of ``{omega in S^{d-1} : |omega - omega0| <= chord}``, chord <= sqrt(2)."""
    theta = 2.0 * math.asin(min(1.0, chord / 2.0))
    if theta > math.pi / 2 + 1e-12:
        raise ValueError("only caps smaller than a hemisphere are supported")
    theta = min(theta, math.pi / 2)
    return 0.5 * sphere_area(d) * float(betainc((d - 1) / 2.0, 0.5, math.sin(theta) ** 2))


def cap_nodes(center, chord: float, n_nodes: int):
    """Quadrature nodes and weights on the chordal cap about ``center``.

    Quasi-uniform points in the tangent ball of geodesic radius ``theta`` are
    pushed to the sphere by the exponential map; weights carry its Jacobian
    ``(sin|t| / |t|)^{d-2}`` and are scaled to sum to the exact cap area.
    """
    c = np.asarray(center, dtype=float)
    d = len(c)
    theta = 2.0 * math.asin(min(1.0, chord / 2.0))
    basis = null_space(c[None, :])  # d x (d-1), orthonormal tangent frame
    t = theta * ball_points(d - 1, n_nodes)
    r = np.linalg.norm(t, axis=1)
    safe = np.where(r > 0, r, 1.0)
    dirs = (t / safe[:, None]) @ basis.T
    nodes = np.cos(r)[:, None] * c[None, :] + np.sin(r)[:, None] * dirs
    nodes /= np.linalg.norm(nodes, axis=1, keepdims=True)
    jac = np.where(r > 0, np.sin(r) / safe, 1.0) ** (d - 2)
    w = jac / np.sum(jac) * chordal_cap_area(d, chord)
    return nodes, w


def min_pairwise_chord(directions: np.ndarray) -> float:
    if len(directions) < 2:
        return math.inf
    g = directions @ directions.T
    np.fill_diagonal(g, -np.inf)
    return float(math.sqrt(max(0.0, 2.0 - 2.0 * np.max(g))))


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------


@dataclass
class KnappConfig:
    d: int = 4
    n: int = 1
    kappa: float = 0.5
    rho: float = 0.01
    epsilon: float = 0.01

    def __post_init__(self):
        if self.d < 4:
            raise ValueError("the construction needs d >= 4")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not (0 < self.kappa < 1 and 0 < self.rho < 1 and 0 < self.epsilon < 1):
            raise ValueError("kappa, rho and epsilon must lie in (0, 1)")
        if self.rho + self.epsilon + self.rho * self.epsilon >= PHASE_WINDOW:
            raise ValueError("need rho + eps + rho*eps < 1/10")

    @property
    def R(self) -> float:
        return (2.0 * math.pi * self.n) ** (1.0 / self.kappa)

    @property
    def alpha(self) -> float:
        return self.d * (1.0 - self.kappa)

    def formula_beta(self) -> float:
        return self.d - 1.0 - self.kappa * (self.d - 2.0)


@dataclass
class KnappReport:
    config: dict
    R: float
    gamma_count: int
    sigma_omega: float
    mu_mass: float
    mu_mass_reference: float
    c_alpha: float
    min_extension_ratio: float
    phase_pairs: int
    phase_inside: int
    max_abs_residual: float
    implied_beta_single: float
    formula_beta: float
    log_Q: float
    residuals: list = field(default_factory=list, repr=False)

    @property
    def containment_fraction(self) -> float:
        return self.phase_inside / self.phase_pairs if self.phase_pairs else 0.0

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("residuals")
        out["containment_fraction"] = self.containment_fraction
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def residuals_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["omega_idx", "x_idx", "phase_mod_2pi"])
        for i, j, p in self.residuals:
            w.writerow([int(i), int(j), fmt17(p)])
        return buf.getvalue()


def _sample_lambda(cfg: KnappConfig, centers_m: np.ndarray, k: int, rng) -> tuple:
    """``k`` points ``x = R^{kappa-1} m + u`` of Lambda with their (m, u) split."""
    R = cfg.R
    idx = rng.integers(0, len(centers_m), size=k)
    m = centers_m[idx]
    dirs = rng.standard_normal((k, cfg.d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    rad = (cfg.epsilon / R) * rng.uniform(0, 1, k) ** (1.0 / cfg.d) * (1 - 1e-12)
    u = dirs * rad[:, None]
    x = R ** (cfg.kappa - 1.0) * m + u
    inside = np.einsum("ij,ij->i", x, x) <= 1.0
    return m[inside], u[inside], x[inside]


def _sample_omega(cfg: KnappConfig, gamma: SphereLatticeSet, k: int, rng) -> tuple:
    """``k`` points of Omega as ``(cap index, l, v)`` with ``omega = l/n + v`` on the sphere."""
    R = cfg.R
    chord = cfg.rho / R
    theta = 2.0 * math.asin(chord / 2.0)
    idx = rng.integers(0, len(gamma), size=k)
    ell = gamma.vectors[idx]
    w0 = ell / cfg.n
    g = rng.standard_normal((k, cfg.d))
    g -= np.einsum("ij,ij->i", g, w0)[:, None] * w0
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    ang = theta * rng.uniform(0, 1, k) ** (1.0 / (cfg.d - 1)) * (1 - 1e-9)
    omega = np.cos(ang)[:, None] * w0 + np.sin(ang)[:, None] * g
    return idx, ell, omega - w0, omega


def knapp_pipeline(cfg: KnappConfig, phase_samples: int = 10_000, x_samples: int = 200,
                   nodes_per_cap: int = 48, c_alpha_centers: int = 256, seed: int = 0) -> KnappReport:
    """Build Gamma, Omega, Lambda and mu for ``cfg`` and measure every link of the argument."""
    rng = np.random.default_rng(seed)
    R, d = cfg.R, cfg.d
    gamma = sum_of_squares_points(d, cfg.n ** 2)
    if len(gamma) == 0:
        raise ValueError("Gamma is empty: sigma(Omega) = 0")
    dirs = gamma.directions()
    chord = cfg.rho / R
    sep = min_pairwise_chord(dirs)
    if sep <= 2.0 * chord:
        raise ValueError("caps around Gamma overlap")
    sigma_omega = len(gamma) * chordal_cap_area(d, chord)

    # Lambda and mu
    mu = make_lattice_measure(d, R, cfg.kappa, cfg.epsilon, samples_per_ball=1)
    mass = mu.mass
    ref = ball_volume(d) ** 2 * cfg.epsilon ** d * R ** (-d * cfg.kappa)
    radii = dyadic_radii(cfg.epsilon / R, 2.0)
    c_alpha = c_alpha_estimate(mu, cfg.alpha, radii, extra_centers=np.zeros((1, d)),
                               max_centers=c_alpha_centers, seed=seed).value

    # phase containment on random (omega, x) pairs
    spacing = R ** (cfg.kappa - 1.0)
    centers_m = np.rint(mu.points / spacing).astype(np.int64)
    m_s, u_s, x_s = _sample_lambda(cfg, centers_m, 2 * phase_samples, rng)
    m_s, u_s, x_s = m_s[:phase_samples], u_s[:phase_samples], x_s[:phase_samples]
    k = len(x_s)
    oi, ell, v, omega = _sample_omega(cfg, gamma, k, rng)
    I2 = R ** cfg.kappa * np.einsum("ij,ij->i", v, m_s)
    I3 = 2.0 * math.pi * R ** (1.0 - cfg.kappa) * np.einsum("ij,ij->i", ell, u_s)
    I4 = R * np.einsum("ij,ij->i", v, u_s)
    direct = wrap_phase(R * np.einsum("ij,ij->i", omega, x_s))
    resid = I2 + I3 + I4
    # cross-check: the direct phase agrees with the decomposition modulo 2 pi
    agree = np.abs(wrap_phase(direct - resid))
    if np.max(agree) > 1e-6:
        raise AssertionError("phase decomposition disagrees with direct evaluation")
    inside = int(np.sum(np.abs(direct) < PHASE_WINDOW))
    residuals = list(zip(oi.tolist(), range(k), direct.tolist()))

    # extension integral over Omega at sampled x in Lambda
    nodes, weights = [], []
    for c in dirs:
        nd, w = cap_nodes(c, chord, nodes_per_cap)
        nodes.append(nd)
        weights.append(w)
    nodes = np.concatenate(nodes)
    weights = np.concatenate(weights)
    xs = x_s[:x_samples]

    def ext(x):
        return abs(np.sum(weights * np.exp(1j * R * (nodes @ x))))

    vals = np.array(ordered_map(ext, xs))
    # with f = chi_Omega / sqrt(sigma(Omega)): |(f dsigma)^(Rx)| / sqrt(sigma) = |int_Omega| / sigma
    min_ratio = float(np.min(vals) / sigma_omega)

    Q = min_ratio * math.sqrt(sigma_omega) * mass / math.sqrt(c_alpha * mass)
    log_Q = math.log(Q)
    return KnappReport(
        config=asdict(cfg), R=R, gamma_count=len(gamma), sigma_omega=sigma_omega,
        mu_mass=mass, mu_mass_reference=ref, c_alpha=c_alpha,
        min_extension_ratio=min_ratio, phase_pairs=k, phase_inside=inside,
        max_abs_residual=float(np.max(np.abs(direct))),
        implied_beta_single=-2.0 * log_Q / math.log(R),
        formula_beta=cfg.formula_beta(), log_Q=log_Q, residuals=residuals,
    )


def implied_beta_fit(reports) -> float:
    """``-2 x`` the slope of ``log Q`` against ``log R`` across several runs.

    A single R mixes the exponent with the unspecified constants of the
    argument; the slope removes them.
    """
    if len(reports) < 2:
        raise ValueError("need at least two reports")
    x = np.log([r.R for r in reports])
    y = np.array([r.log_Q for r in reports])
    return float(-2.0 * stats.linregress(x, y).slope)


__all__ = [
    "SphereLatticeSet", "KnappConfig", "KnappReport", "PhaseTerms", "BudgetExceeded",
    "sum_of_squares_points", "jacobi_r4", "gamma_count_check", "phase_decomposition",
    "wrap_phase", "chordal_cap_area", "cap_nodes", "knapp_pipeline", "implied_beta_fit",
]
