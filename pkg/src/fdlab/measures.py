"""Discrete fractal measures in the unit ball and brute-force c_alpha estimates.

Every measure is a finite weighted point cloud. Absolutely continuous pieces
(lattice neighbourhoods, Lebesgue measure on a ball) are represented by
midpoint or quasi-Monte Carlo quadrature, so one representation serves all
downstream oscillatory sums.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from ._util import as_points, ball_points, ball_volume, n_workers, sphere_area

SUPPORT_TOL = 1e-12
DEFAULT_POINT_BUDGET = 4_000_000
SPHERE_SEED = 20240607


@dataclass
class DiscreteMeasure:
    """Weighted point cloud ``sum_j w_j delta_{x_j}`` in R^d.

    Parameters
    ----------
    d : int
        Ambient dimension.
    points : ndarray, shape (n, d)
        Support points.
    weights : ndarray, shape (n,)
        Nonnegative weights.
    label : str
        Free-text description of the construction.
    expanded_support : bool
        Set for rescaled measures whose support may leave B(0, 1).
    """

    d: int
    points: np.ndarray
    weights: np.ndarray
    label: str = ""
    expanded_support: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.ascontiguousarray(as_points(self.points), dtype=float)
        self.weights = np.ascontiguousarray(np.asarray(self.weights, dtype=float).ravel())
        if self.points.shape[1] != self.d:
            raise ValueError(f"points have dimension {self.points.shape[1]}, expected {self.d}")
        if len(self.points) != len(self.weights) or len(self.points) == 0:
            raise ValueError("points and weights must have equal, positive length")
        if np.any(self.weights < 0) or not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite and nonnegative")
        if not self.expanded_support:
            rmax = float(np.sqrt(np.max(np.einsum("ij,ij->i", self.points, self.points))))
            if rmax > 1.0 + SUPPORT_TOL:
                raise ValueError(f"support leaves the unit ball (max norm {rmax!r})")

    @property
    def mass(self) -> float:
        return float(np.sum(self.weights))

    def __len__(self) -> int:
        return len(self.weights)

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "d": int(self.d),
            "label": self.label,
            "points": self.points.tolist(),
            "weights": self.weights.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> "DiscreteMeasure":
        pts = np.asarray(doc["points"], dtype=float).reshape(-1, int(doc["d"]))
        w = np.asarray(doc["weights"], dtype=float)
        rmax = float(np.sqrt(np.max(np.einsum("ij,ij->i", pts, pts))))
        return cls(int(doc["d"]), pts, w, doc.get("label", ""),
                   expanded_support=rmax > 1.0 + SUPPORT_TOL)

    @classmethod
    def from_json(cls, text: str) -> "DiscreteMeasure":
        return cls.from_dict(json.loads(text))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "DiscreteMeasure":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


@dataclass
class AlphaConstantReport:
    alpha: float
    value: float
    witness_center: np.ndarray
    witness_radius: float
    radii: list


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def lattice_centers(d: int, spacing: float) -> np.ndarray:
    """All points of ``spacing * Z^d`` in the closed unit ball, lexicographic."""
    k = int(math.floor(1.0 / spacing + 1e-9))
    axis = np.arange(-k, k + 1)
    # enumerate slice by slice along the first axis to bound memory
    chunks = []
    rest = np.stack(np.meshgrid(*([axis] * (d - 1)), indexing="ij"), axis=-1).reshape(-1, d - 1) \
        if d > 1 else np.zeros((1, 0), dtype=int)
    rest_sq = np.einsum("ij,ij->i", rest, rest) if d > 1 else np.zeros(1, dtype=int)
    lim = (1.0 / spacing) ** 2 * (1.0 + 1e-12)
    for a in axis:
        keep = rest_sq + a * a <= lim
        if np.any(keep):
            block = np.empty((int(keep.sum()), d), dtype=int)
            block[:, 0] = a
            block[:, 1:] = rest[keep]
            chunks.append(block)
    return np.concatenate(chunks) * spacing


def make_lattice_measure(d: int, R: float, kappa: float, epsilon: float,
                         samples_per_ball: int = 1) -> DiscreteMeasure:
    """Quadrature of the indicator of ``(R^{kappa-1} Z^d + B(0, eps/R)) cap B(0,1)``.

    Each lattice centre in the unit ball carries a ball of radius ``eps/R``
    represented by ``samples_per_ball`` equal-weight points whose weights sum
    to the ball volume. Sample points that would leave the unit ball are
    pulled radially onto the unit sphere, so mass and support both hold.
    """
    if d < 2:
        raise ValueError("lattice measure needs d >= 2")
    if not (R > 1 and 0 < kappa < 1 and 0 < epsilon < 1 and samples_per_ball >= 1):
        raise ValueError("parameters out of range")
    spacing = R ** (kappa - 1.0)
    if spacing >= 2.0:
        raise ValueError(f"lattice spacing R^(kappa-1) = {spacing:.4g} >= 2: no interior lattice cell")
    radius = epsilon / R
    centers = lattice_centers(d, spacing)
    ball_mass = ball_volume(d) * radius ** d
    offsets = radius * ball_points(d, samples_per_ball)
    pts = (centers[:, None, :] + offsets[None, :, :]).reshape(-1, d)
    norms = np.sqrt(np.einsum("ij,ij->i", pts, pts))
    out = norms > 1.0
    pts[out] /= norms[out, None]
    w = np.full(len(pts), ball_mass / samples_per_ball)
    label = f"lattice d={d} R={R:g} kappa={kappa:g} eps={epsilon:g} centers={len(centers)}"
    return DiscreteMeasure(d, pts, w, label, meta={
        "kind": "lattice", "R": R, "kappa": kappa, "epsilon": epsilon,
        "n_centers": len(centers), "spacing": spacing, "ball_radius": radius,
    })


def cantor_points_1d(ratio: float, depth: int) -> np.ndarray:
    """Cell centres of generation ``depth`` of the two-interval Cantor set in [0, 1]."""
    lefts = np.zeros(1)
    length = 1.0
    for _ in range(depth):
        lefts = np.concatenate([lefts, lefts + (1.0 - ratio) * length])
        length *= ratio
    return np.sort(lefts + 0.5 * length)


def make_cantor_measure(d: int, ratio: float, depth: int,
                        budget: int = DEFAULT_POINT_BUDGET) -> DiscreteMeasure:
    """Natural self-similar measure on the d-fold product Cantor dust.

    The product of ``d`` copies of the middle-gap Cantor construction with
    contraction ``ratio`` is centred at the origin and scaled so the cube
    fits in the unit ball. Each of the ``2^{d depth}`` cells gets weight
    ``2^{-d depth}``.
    """
    if not (0 < ratio < 0.5):
        raise ValueError("ratio must lie in (0, 1/2)")
    if d < 1 or depth < 1:
        raise ValueError("need d >= 1 and depth >= 1")
    count = 2 ** (d * depth)
    if count > budget:
        raise ValueError(f"{count} points exceeds the budget of {budget}")
    line = cantor_points_1d(ratio, depth)
    scale = 2.0 / math.sqrt(d)
    axes = [scale * (line - 0.5)] * d
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    alpha = d * math.log(2.0) / math.log(1.0 / ratio)
    w = np.full(count, 1.0 / count)
    return DiscreteMeasure(d, pts, w, f"cantor d={d} ratio={ratio:g} depth={depth} alpha={alpha:.6g}",
                           meta={"kind": "cantor", "nominal_alpha": alpha})


def sphere_nodes(d: int, n: int, seed: int = SPHERE_SEED) -> tuple[np.ndarray, str]:
    """Near-uniform nodes on S^{d-1} and the scheme used to build them."""
    if d == 2:
        theta = 2.0 * np.pi * np.arange(n) / n
        return np.column_stack([np.cos(theta), np.sin(theta)]), "equal-angle"
    if d == 3:
        i = np.arange(n) + 0.5
        z = 1.0 - 2.0 * i / n
        phi = np.pi * (3.0 - math.sqrt(5.0)) * i
        r = np.sqrt(1.0 - z * z)
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z]), "spiral"
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True), "monte-carlo"


def make_sphere_measure(d: int, n_points: int, seed: int = SPHERE_SEED) -> DiscreteMeasure:
    """Normalized surface measure on S^{d-1} as ``n_points`` equal point masses."""
    if d < 2 or n_points < 2:
        raise ValueError("need d >= 2 and n_points >= 2")
    pts, scheme = sphere_nodes(d, n_points, seed)
    pts = pts / np.maximum(1.0, np.linalg.norm(pts, axis=1, keepdims=True))
    return DiscreteMeasure(d, pts, np.full(n_points, 1.0 / n_points),
                           f"sphere d={d} n={n_points} {scheme}",
                           meta={"kind": "sphere", "scheme": scheme, "nominal_alpha": d - 1})


def make_grid_measure(d: int, n_per_axis: int, lo: float = -1.0, hi: float = 1.0,
                      clip_to_ball: bool = True) -> DiscreteMeasure:
    """Midpoint-rule quadrature of Lebesgue measure on a box (optionally cut to B(0,1))."""
    h = (hi - lo) / n_per_axis
    axis = lo + h * (np.arange(n_per_axis) + 0.5)
    pts = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    if clip_to_ball:
        pts = pts[np.einsum("ij,ij->i", pts, pts) <= 1.0]
    return DiscreteMeasure(d, pts, np.full(len(pts), h ** d),
                           f"grid d={d} n={n_per_axis} box=[{lo:g},{hi:g}]",
                           meta={"kind": "grid", "nominal_alpha": d})


def point_mass(x, mass: float = 1.0) -> DiscreteMeasure:
    x = np.asarray(x, dtype=float).ravel()
    return DiscreteMeasure(len(x), x[None, :], [mass], f"point mass {mass:g} at {x.tolist()}")


# ---------------------------------------------------------------------------
# c_alpha
# ---------------------------------------------------------------------------


def dyadic_radii(r_min: float, r_max: float) -> list[float]:
    """``r_min * 2^j`` for j = 0, 1, ... up to the first value >= r_max."""
    out = [r_min]
    while out[-1] < r_max:
        out.append(out[-1] * 2.0)
    return out


def ball_masses(mu: DiscreteMeasure, centers: np.ndarray, r: float,
                tree: cKDTree | None = None) -> np.ndarray:
    """``mu(B(c, r))`` for every row ``c`` of ``centers`` (closed balls)."""
    tree = tree if tree is not None else cKDTree(mu.points)
    # a relative slack keeps boundary points stable under rescaling x -> Rx
    rr = r * (1.0 + 1e-9)
    w = mu.weights
    if np.all(w == w[0]):
        counts = tree.query_ball_point(centers, rr, return_length=True, workers=n_workers())
        return w[0] * np.asarray(counts, dtype=float)
    idx = tree.query_ball_point(centers, rr, workers=n_workers())
    return np.array([np.sum(w[np.asarray(i, dtype=int)]) for i in idx])


def c_alpha_estimate(mu: DiscreteMeasure, alpha: float, radii, extra_centers=None,
                     max_centers: int | None = None, seed: int = 0) -> AlphaConstantReport:
    """Brute-force lower estimate of ``c_alpha(mu) = sup mu(B(x,r)) / r^alpha``.

    Candidate centres are the support points plus ``extra_centers``; when
    ``max_centers`` is given and the support is larger, a seeded subsample of
    the support is used instead (the result is still a lower bound).
    """
    radii = [float(r) for r in radii]
    if not radii:
        raise ValueError("radii must be nonempty")
    if any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    if not (0 < alpha <= mu.d):
        raise ValueError(f"alpha must lie in (0, {mu.d}]")
    centers = mu.points
    if max_centers is not None and len(centers) > max_centers:
        rng = np.random.default_rng(seed)
        centers = centers[np.sort(rng.choice(len(centers), max_centers, replace=False))]
    if extra_centers is not None and len(extra_centers):
        centers = np.vstack([centers, as_points(extra_centers, mu.d)])
    tree = cKDTree(mu.points)
    best = (-1.0, None, None)
    for r in radii:
        vals = ball_masses(mu, centers, r, tree) / r ** alpha
        j = int(np.argmax(vals))
        if vals[j] > best[0]:
            best = (float(vals[j]), centers[j].copy(), r)
    return AlphaConstantReport(alpha, best[0], best[1], best[2], radii)


def scale_measure(mu: DiscreteMeasure, R: float, alpha: float) -> DiscreteMeasure:
    """``d mu_R(x) = R^alpha d mu(x / R)``: points scale by R, weights by R^alpha."""
    if R < 1:
        raise ValueError("R must be >= 1")
    return DiscreteMeasure(mu.d, R * mu.points, R ** alpha * mu.weights,
                           f"{mu.label} scaled R={R:g} alpha={alpha:g}",
                           expanded_support=True, meta=dict(mu.meta))


__all__ = [
    "DiscreteMeasure", "AlphaConstantReport", "make_lattice_measure", "make_cantor_measure",
    "make_sphere_measure", "make_grid_measure", "point_mass", "c_alpha_estimate",
    "scale_measure", "dyadic_radii", "ball_masses", "lattice_centers", "sphere_nodes",
    "sphere_area", "ball_volume",
]
