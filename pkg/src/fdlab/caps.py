"""Caps on the paraboloid and the sphere, and the multi-scale bookkeeping around them.

Frequencies ``xi`` live in R^{d-1}; spacetime points are d-vectors ``(x, t)``
with the time coordinate last. A cap is the graph of a phase over an axis
parallel cube ``Q`` whose corner and side are stored as exact fractions, so
partitions tile exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import betaincinv, gammaln
from scipy.stats import norm, qmc

from ._util import as_points

DOMAIN_RADIUS = 0.5
DOMAIN_TOL = 1e-12


class ZeroDataError(ValueError):
    """The data vanish identically, so the quotient is 0/0."""


# ---------------------------------------------------------------------------
# phases
# ---------------------------------------------------------------------------


def _base_value_grad(kind: str, xi: np.ndarray):
    r2 = np.einsum("...i,...i->...", xi, xi)
    if kind == "paraboloid":
        return -r2, -2.0 * xi
    s = np.sqrt(1.0 - r2)
    return s - 1.0, -xi / s[..., None]


@dataclass(frozen=True)
class Phase:
    """``phi(xi) = -|xi|^2`` or ``sqrt(1 - |xi|^2) - 1``, possibly rescaled.

    ``rescalings`` lists the ``(xi0, delta)`` pairs applied so far, oldest
    first. Each one maps ``phi`` to
    ``delta^{-2} (phi(xi0 + delta xi) - delta grad phi(xi0) . xi - phi(xi0))``.
    """

    kind: str
    rescalings: tuple = ()

    def __post_init__(self):
        if self.kind not in ("paraboloid", "sphere"):
            raise ValueError(f"unknown phase kind {self.kind!r}")

    def collapsed(self) -> tuple:
        """The single ``(base, ratio)`` pair equivalent to the whole composition.

        Scaling maps compose: applying ``(x1, d1)`` after ``(x0, d0)`` is the
        map at ``x0 + d0 x1`` with ratio ``d0 d1``.
        """
        base, ratio = None, 1.0
        for x0, delta in self.rescalings:
            x0 = np.asarray(x0, dtype=float)
            base = x0 if base is None else base + ratio * x0
            ratio *= delta
        return base, ratio

    def value_grad(self, xi):
        xi = np.asarray(xi, dtype=float)
        if not self.rescalings:
            return _base_value_grad(self.kind, xi)
        if self.kind == "paraboloid":
            # the second-order Taylor expansion of -|xi|^2 is exact
            return -np.einsum("...i,...i->...", xi, xi), -2.0 * xi
        # sphere: difference quotients rewritten without cancellation
        P, D = self.collapsed()
        s0 = math.sqrt(1.0 - float(P @ P))
        px = np.einsum("...i,i->...", xi, P)
        x2 = np.einsum("...i,...i->...", xi, xi)
        q = 2.0 * px + D * x2  # (|P + D xi|^2 - |P|^2) / D
        s1 = np.sqrt(1.0 - (P @ P) - D * q)
        val = -px * q / (s0 * (s1 + s0) ** 2) - x2 / (s1 + s0)
        grad = -xi / s1[..., None] - np.multiply.outer(q / (s0 * s1 * (s1 + s0)), P)
        return val, grad

    def pull_back(self, xi) -> np.ndarray:
        """The unscaled frequency that ``xi`` corresponds to."""
        out = np.asarray(xi, dtype=float)
        for x0, delta in reversed(self.rescalings):
            out = np.asarray(x0) + delta * out
        return out

    def contains(self, xi) -> bool:
        xi = np.asarray(xi, dtype=float)
        if np.any(np.linalg.norm(np.atleast_2d(xi), axis=-1) > DOMAIN_RADIUS + DOMAIN_TOL):
            return False
        base = self.pull_back(xi)
        return bool(np.all(np.linalg.norm(np.atleast_2d(base), axis=-1) <= DOMAIN_RADIUS + DOMAIN_TOL))

    def __call__(self, xi):
        if not self.contains(xi):
            raise ValueError("frequency outside |xi| <= 1/2")
        return self.value_grad(xi)[0]

    def grad(self, xi):
        if not self.contains(xi):
            raise ValueError("frequency outside |xi| <= 1/2")
        return self.value_grad(xi)[1]


def rescale_phase(phase: Phase, xi0, delta: float) -> Phase:
    """Apply the scaling map at ``xi0`` with ratio ``delta``."""
    xi0 = tuple(float(a) for a in np.asarray(xi0, dtype=float).ravel())
    if not (0 < delta <= 1):
        raise ValueError("delta must lie in (0, 1]")
    if phase.kind == "sphere" and math.hypot(*xi0) > DOMAIN_RADIUS - delta / 2.0 + DOMAIN_TOL:
        raise ValueError("sphere rescaling needs |xi0| <= 1/2 - delta/2")
    return Phase(phase.kind, phase.rescalings + ((xi0, float(delta)),))


def osculating_quadratic(phase: Phase, xi0, xi):
    """``(1/2) xi^T H xi`` with H the Hessian of the unscaled phase at ``xi0``.

    Rescalings at ``xi0`` converge to this quadratic as ``delta -> 0``.
    """
    xi0 = np.asarray(xi0, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if phase.kind == "paraboloid":
        return -np.einsum("...i,...i->...", xi, xi)
    s = math.sqrt(1.0 - float(xi0 @ xi0))
    H = -(np.eye(len(xi0)) / s + np.outer(xi0, xi0) / s ** 3)
    return 0.5 * np.einsum("...i,ij,...j->...", xi, H, xi)


def normal_at(phase: Phase, xi) -> np.ndarray:
    """Unit normal ``(-grad phi, 1) / |.|`` to the graph, last component positive."""
    g = np.asarray(phase.grad(xi), dtype=float)
    n = np.concatenate([-g, np.ones(g.shape[:-1] + (1,))], axis=-1)
    return n / np.linalg.norm(n, axis=-1, keepdims=True)


# ---------------------------------------------------------------------------
# caps
# ---------------------------------------------------------------------------


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class Cap:
    """Graph of ``phase`` over the cube ``lower + [0, side]^{d-1}`` (exact fractions)."""

    phase: Phase
    lower: tuple
    side: Fraction

    def __post_init__(self):
        if not (0 < self.side <= 1):
            raise ValueError("side must lie in (0, 1]")
        far = [max(abs(lo), abs(lo + self.side)) for lo in self.lower]
        if math.sqrt(sum(float(a) ** 2 for a in far)) > DOMAIN_RADIUS + DOMAIN_TOL:
            raise ValueError("cube leaves the disc |xi| <= 1/2")

    @classmethod
    def centered(cls, phase: Phase, center, side) -> "Cap":
        side = _frac(side)
        lower = tuple(_frac(c if isinstance(c, Fraction) else float(c)) - side / 2 for c in center)
        return cls(phase, lower, side)

    @property
    def dim(self) -> int:
        """Ambient dimension d (frequencies are (d-1)-vectors)."""
        return len(self.lower) + 1

    @property
    def delta(self) -> float:
        return float(self.side)

    @property
    def center(self) -> np.ndarray:
        return np.array([float(lo + self.side / 2) for lo in self.lower])

    @property
    def bounds(self) -> tuple:
        return tuple((lo, lo + self.side) for lo in self.lower)

    def sample_points(self, per_axis: int = 2, include_center: bool = True) -> np.ndarray:
        """Tensor grid of ``per_axis`` points per axis including the corners, plus the centre."""
        per_axis = max(2, int(per_axis))
        axes = [np.linspace(float(lo), float(lo + self.side), per_axis) for lo in self.lower]
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))
        if include_center:
            pts = np.vstack([self.center[None, :], pts])
        return pts

    def normal(self) -> np.ndarray:
        return normal_at(self.phase, self.center)

    def contains_cube(self, other: "Cap") -> bool:
        return all(a0 <= b0 and b0 + other.side <= a0 + self.side
                   for a0, b0 in zip(self.lower, other.lower))


def cap_partition(cap: Cap, K: float) -> list:
    """Children of side ``side / k`` tiling the cube, with ``k = max(1, round(K))``.

    The children come in lexicographic order of their lower corners; the
    effective ratio ``k`` is ``cap.side / child.side``.
    """
    k = max(1, int(round(K)))
    side = cap.side / k
    out = []
    for idx in itertools.product(range(k), repeat=cap.dim - 1):
        lower = tuple(lo + i * side for lo, i in zip(cap.lower, idx))
        out.append(Cap(cap.phase, lower, side))
    return out


def transversality_constant(caps, samples_per_cap: int = 2) -> float:
    """Least ``|Y(xi_1) ^ ... ^ Y(xi_m)|`` over corner/centre samples of the caps.

    The wedge magnitude is ``sqrt(det G)`` with G the Gram matrix of the normals.
    """
    caps = list(caps)
    m = len(caps)
    if m < 2:
        raise ValueError("need at least two caps")
    d = caps[0].dim
    if m > d:
        raise ValueError(f"at most d = {d} caps")
    normals = [normal_at(c.phase, c.sample_points(samples_per_cap)) for c in caps]
    return float(np.min(_wedge_over_tuples(normals)))


def wedge_norm(vectors) -> float:
    """``|v_1 ^ ... ^ v_m| = sqrt(det Gram)``."""
    V = np.asarray(vectors, dtype=float)
    return float(math.sqrt(max(0.0, np.linalg.det(V @ V.T))))


def _wedge_over_tuples(normals, chunk: int = 200_000) -> np.ndarray:
    sizes = [len(n) for n in normals]
    total = int(np.prod(sizes))
    out = np.empty(total)
    grids = np.indices(sizes).reshape(len(sizes), -1)
    for a in range(0, total, chunk):
        sel = grids[:, a:a + chunk]
        stack = np.stack([normals[k][sel[k]] for k in range(len(normals))], axis=1)  # (B, m, d)
        gram = np.einsum("bid,bjd->bij", stack, stack)
        out[a:a + chunk] = np.sqrt(np.clip(np.linalg.det(gram), 0.0, None))
    return out


def v_set_select(parent: Cap, children, V, K_next: float, per_axis: int = 2) -> list:
    """Children with ``dist(Y(xi), V) <= parent.side / K_next`` for some sampled ``xi``.

    ``V`` is a ``d x m`` array with orthonormal columns (or a single vector).
    """
    V = np.asarray(V, dtype=float)
    if V.ndim == 1:
        V = V[:, None]
    tol = parent.delta / K_next
    out = []
    for c in children:
        Y = normal_at(c.phase, c.sample_points(per_axis))
        resid = Y - (Y @ V) @ V.T
        if np.min(np.linalg.norm(resid, axis=1)) <= tol + 1e-15:
            out.append(c)
    return out


# ---------------------------------------------------------------------------
# dual cuboids and mollifiers
# ---------------------------------------------------------------------------


def rotation_to_last_axis(y) -> np.ndarray:
    """Proper rotation taking the unit vector ``y`` to ``e_d`` (rotation in span(y, e_d))."""
    a = np.asarray(y, dtype=float)
    a = a / np.linalg.norm(a)
    d = len(a)
    b = np.zeros(d)
    b[-1] = 1.0
    c = float(a @ b)
    if c <= -1.0 + 1e-12:
        raise ValueError("antipodal normal")
    W = np.outer(b, a) - np.outer(a, b)
    return np.eye(d) + W + (W @ W) / (1.0 + c)


@dataclass
class DualCuboid:
    """Box ``delta^{-1} x ... x delta^{-1} x delta^{-2}`` with long side along the cap normal."""

    cap: Cap
    dims: np.ndarray
    rotation: np.ndarray  # maps Y_tau to e_d

    def to_frame(self, z) -> np.ndarray:
        """Rotated coordinates ``(x', t')`` of spacetime points."""
        return as_points(z, len(self.dims)) @ self.rotation.T

    def from_frame(self, w) -> np.ndarray:
        return as_points(w, len(self.dims)) @ self.rotation


def dual_cuboid(cap: Cap) -> DualCuboid:
    d = cap.dim
    delta = cap.delta
    dims = np.array([1.0 / delta] * (d - 1) + [1.0 / delta ** 2])
    return DualCuboid(cap, dims, rotation_to_last_axis(cap.normal()))


def zeta_mass(d: int, c: float) -> float:
    """``int_{R^d} (1 + |y|^2)^{-c} dy = pi^{d/2} Gamma(c - d/2) / Gamma(c)``."""
    if c <= d / 2.0:
        raise ValueError("(1+|y|^2)^{-c} is integrable only for c > d/2")
    return float(math.exp(0.5 * d * math.log(math.pi) + gammaln(c - d / 2.0) - gammaln(c)))


def _frame_scales(dual: DualCuboid, K: float) -> np.ndarray:
    delta = dual.cap.delta
    d = len(dual.dims)
    return np.array([delta / K] * (d - 1) + [delta ** 2 / K])


def mollifier_zeta(dual: DualCuboid, K: float, c_eps: float, z) -> np.ndarray | float:
    """Unit-mass ``zeta_{K tau'}`` at spacetime point(s) ``z``.

    ``A (1 + |delta x'/K|^2 + |delta^2 t'/K|^2)^{-c}`` in the rotated frame,
    with ``A = delta^{d+1} / (K^d I_c)`` and ``I_c`` the mass of the profile.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    d = len(dual.dims)
    single = np.asarray(z).ndim == 1
    w = dual.to_frame(z) * _frame_scales(dual, K)
    A = dual.cap.delta ** (d + 1) / (K ** d * zeta_mass(d, c_eps))
    out = A * (1.0 + np.einsum("ij,ij->i", w, w)) ** (-c_eps)
    return float(out[0]) if single else out


def zeta_truncation_radius(d: int, c: float, tail: float = 1e-6) -> float:
    """Radius L of the profile ball outside which the normalized profile has mass ``tail``."""
    zeta_mass(d, c)
    p = float(betaincinv(d / 2.0, c - d / 2.0, 1.0 - tail))
    return math.sqrt(p / (1.0 - p))


def zeta_samples(dual: DualCuboid, K: float, c_eps: float, n: int, seed: int = 0) -> np.ndarray:
    """``n`` seeded quasi-random spacetime offsets distributed as ``zeta_{K tau'}``.

    The profile radius satisfies ``r^2/(1+r^2) ~ Beta(d/2, c - d/2)``, so it
    is drawn by inverting the regularized incomplete beta function; the
    direction is a normalized Gaussian. Averages over these offsets give
    unbiased convolutions with no truncation.
    """
    d = len(dual.dims)
    zeta_mass(d, c_eps)
    u = qmc.Sobol(d + 1, scramble=True, seed=seed).random(n)
    u = np.clip(u, 1e-12, 1 - 1e-12)
    p = betaincinv(d / 2.0, c_eps - d / 2.0, u[:, 0])
    r = np.sqrt(p / (1.0 - p))
    g = norm.ppf(u[:, 1:])
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    w = g * r[:, None] / _frame_scales(dual, K)
    return dual.from_frame(w)


# ---------------------------------------------------------------------------
# scale ladder
# ---------------------------------------------------------------------------


def multilinear_constant(theta: float, d: int) -> float:
    """The constant model ``c(theta) = theta^{-2d}``."""
    return theta ** (-2 * d)


@dataclass
class ScaleLadder:
    R: float
    eps: float
    d: int
    K: dict  # m -> K_m for m = 2..d+1
    chain: list = field(default_factory=list)  # (m, lhs_log, rhs_log, ok)
    eps_in_range: bool = True
    explicit: bool = False

    @property
    def scales(self) -> list:
        return [self.K[m] for m in sorted(self.K)]

    def monotone(self) -> bool:
        s = self.scales
        return all(a < b for a, b in zip(s, s[1:]))

    def below_R_eps(self) -> bool:
        return self.K[self.d + 1] < self.R ** self.eps

    def lower_gap_ok(self) -> bool:
        """Whether ``R^{1/c(eps)} < K_2`` holds strictly (log-space comparison).

        ``K_2`` sits within ~1e-5 of 1 for typical ladders, so its logarithm
        carries only ~11 good digits; ties are decided with a 1e-9 margin.
        """
        return math.log(self.K[2]) > math.log(self.R) / multilinear_constant(self.eps, self.d) * (1 + 1e-9)

    def rows(self) -> list:
        ok = {m: okm for m, _, _, okm in self.chain}
        return [(m, self.K[m], ok.get(m)) for m in sorted(self.K)]


def _chain_report(K: dict, eps: float, d: int) -> list:
    out = []
    for m in range(2, d + 1):
        lhs = (8 * m + 2 * d * m) * math.log(K[m])  # log(K_m^{8m} c(K_m^{-m}))
        rhs = eps * math.log(K[m + 1])
        out.append((m, lhs, rhs, bool(lhs <= rhs * (1 + 1e-12))))
    return out


def build_scale_ladder(R: float, eps: float, d: int, K_list=None) -> ScaleLadder:
    """``K_m = R^{eps^{2(d+2-m)}}`` for m = 2..d+1, with the chain conditions evaluated.

    ``K_list`` overrides the rule with explicit scales (small ladders for
    probes); the chain report is computed the same way.
    """
    if R <= 1:
        raise ValueError("R must exceed 1")
    if not (0 < eps < 1):
        raise ValueError("eps must lie in (0, 1)")
    if d < 2:
        raise ValueError("d must be >= 2")
    if K_list is None:
        K = {m: R ** (eps ** (2 * (d + 2 - m))) for m in range(2, d + 2)}
        explicit = False
    else:
        if len(K_list) != d:
            raise ValueError(f"need {d} scales K_2..K_{d + 1}")
        K = {m: float(k) for m, k in zip(range(2, d + 2), K_list)}
        explicit = True
    return ScaleLadder(R, eps, d, K, _chain_report(K, eps, d),
                       eps_in_range=eps < 1.0 / (4 * d), explicit=explicit)


# ---------------------------------------------------------------------------
# extension operators on grids
# ---------------------------------------------------------------------------


@dataclass
class GridFunction:
    """Samples of ``g`` at midpoint nodes of a cube, with cell volumes."""

    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex).ravel()
        if len(self.nodes) == 0:
            raise ValueError("empty grid")
        if len(self.values) != len(self.nodes):
            raise ValueError("values and nodes differ in length")

    def l2_norm(self) -> float:
        return float(math.sqrt(np.sum(self.weights * np.abs(self.values) ** 2)))

    def restrict(self, cap: Cap) -> "GridFunction":
        mask = _in_cube(self.nodes, cap)
        return GridFunction(self.nodes[mask], self.weights[mask], self.values[mask])


def _in_cube(nodes: np.ndarray, cap: Cap) -> np.ndarray:
    lo = np.array([float(a) for a in cap.lower])
    hi = lo + float(cap.side)
    return np.all((nodes >= lo) & (nodes < hi), axis=1)


def grid_function(cap: Cap, n_per_axis: int, values=None) -> GridFunction:
    """Midpoint grid with ``n_per_axis`` nodes per axis on the cap's cube.

    ``values`` is an array, a callable of the node array, or None (g = 1).
    """
    if n_per_axis < 2:
        raise ValueError("need at least 2 nodes per axis")
    h = cap.delta / n_per_axis
    axes = [float(lo) + h * (np.arange(n_per_axis) + 0.5) for lo in cap.lower]
    nodes = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))
    w = np.full(len(nodes), h ** len(axes))
    if values is None:
        vals = np.ones(len(nodes))
    elif callable(values):
        vals = values(nodes)
    else:
        vals = values
    return GridFunction(nodes, w, vals)


def _phase_matrix(phase: Phase, nodes: np.ndarray, z: np.ndarray) -> np.ndarray:
    phi = phase.value_grad(nodes)[0]
    return np.exp(1j * (z[:, :-1] @ nodes.T + np.outer(z[:, -1], phi)))


def extension_operator(cap: Cap, g: GridFunction, x, t=None):
    """``T_tau g(x, t) = int_Q g(xi) exp(i x.xi + i t phi(xi)) dxi`` by midpoint quadrature.

    ``x`` may be one (d-1)-vector with scalar ``t``, or spacetime points of
    shape (P, d) with ``t=None``.
    """
    gg = g.restrict(cap)
    if t is not None:
        z = np.concatenate([np.asarray(x, dtype=float).ravel(), [float(t)]])[None, :]
        single = True
    else:
        z = as_points(x, cap.dim)
        single = False
    if len(gg.nodes) == 0:
        out = np.zeros(len(z), dtype=complex)
    else:
        out = _phase_matrix(cap.phase, gg.nodes, z) @ (gg.weights * gg.values)
    return complex(out[0]) if single else out


def _abs_T_conv(cap: Cap, g: GridFunction, z: np.ndarray, offsets: np.ndarray, power: float = 1.0):
    """``(|T_cap g|^power * zeta)(z)`` as the mean over the zeta-distributed offsets."""
    gg = g.restrict(cap)
    if len(gg.nodes) == 0 or not np.any(gg.values):
        return np.zeros(len(z))
    pts = (z[:, None, :] - offsets[None, :, :]).reshape(-1, z.shape[1])
    vals = np.abs(_phase_matrix(cap.phase, gg.nodes, pts) @ (gg.weights * gg.values)) ** power
    return vals.reshape(len(z), len(offsets)).mean(axis=1)


# ---------------------------------------------------------------------------
# the quotient Phi and the pointwise-decomposition probe
# ---------------------------------------------------------------------------


def _transversal_tuples(caps, m: int, theta: float, per_axis: int = 2):
    normals = [normal_at(c.phase, c.sample_points(per_axis)) for c in caps]
    for combo in itertools.combinations(range(len(caps)), m):
        if np.min(_wedge_over_tuples([normals[i] for i in combo])) > theta:
            yield combo


def phi_evaluate(parent: Cap, V, tau_next: Cap, g: GridFunction, points, ladder: ScaleLadder,
                 R_loss: float, theta: float = 0.05, c_eps: float | None = None,
                 n_conv: int = 64, seed: int = 0) -> np.ndarray:
    """Single-level evaluation of the quotient Phi at spacetime ``points``.

    ``V`` is a ``d x m`` orthonormal basis. For m = 1 the quotient is 1 by
    definition. Convolutions with mollifiers average over ``n_conv`` seeded
    samples of each kernel; numerator and denominator share the samples of
    a given kernel, so a term present in both cancels exactly.
    """
    V = np.asarray(V, dtype=float)
    if V.ndim == 1:
        V = V[:, None]
    m = V.shape[1]
    d = parent.dim
    z = as_points(points, d)
    if not (1 <= m <= d - 1):
        raise ValueError(f"m = {m} outside [1, {d - 1}]")
    if m == 1:
        return np.ones(len(z))
    if not np.any(g.values):
        raise ZeroDataError("g vanishes identically")
    c = float(d) if c_eps is None else float(c_eps)
    K_m, K_next = ladder.K[m], ladder.K[m + 1]
    kids_m = cap_partition(parent, K_m)
    kids_next = cap_partition(parent, K_next)
    vset = v_set_select(parent, kids_next, V, K_next)

    # denominator: square function over V_{tau,m} and tau_{m+1}
    family = list(vset)
    if not any(u == tau_next for u in family):
        family.append(tau_next)
    own = {}
    for i, u in enumerate(family):
        off = zeta_samples(dual_cuboid(u), 1.0, c, n_conv, seed + i)
        own[u] = _abs_T_conv(u, g, z, off)
    denom = np.sqrt(sum(v ** 2 for v in own.values())) + R_loss ** (-1.0 / ladder.eps) * g.l2_norm()

    # numerator: m-transversal product through the V-restricted operators
    off_parent = zeta_samples(dual_cuboid(parent), K_m, c, n_conv, seed + 10_000)
    restricted = []
    for tk in kids_m:
        members = [u for u in vset if tk.contains_cube(u)]
        if not members:
            restricted.append(np.zeros(len(z)))
            continue
        mask = np.zeros(len(g.nodes), dtype=bool)
        for u in members:
            mask |= _in_cube(g.nodes, u)
        gv = GridFunction(g.nodes[mask], g.weights[mask], g.values[mask])
        restricted.append(_abs_T_conv(tk, gv, z, off_parent, power=1.0 / m))
    best = np.zeros(len(z))
    for combo in _transversal_tuples(kids_m, m, theta):
        prod = np.prod([restricted[i] for i in combo], axis=0)
        best = np.maximum(best, prod)
    numer = K_m ** (2 * m) * best + own[tau_next]
    return numer / denom


@dataclass
class ProbeStats:
    max_ratio: float
    median_ratio: float
    mean_ratio: float
    n_points: int


def _span_basis(vectors) -> np.ndarray:
    q, _ = np.linalg.qr(np.asarray(vectors, dtype=float).T)
    return q


def bg_inequality_probe(cap: Cap, g: GridFunction, ladder: ScaleLadder, points,
                        theta: float = 0.05, return_ratios: bool = False):
    """Ratio of ``|T_tau g|`` to the right side of the pointwise multi-scale decomposition.

    The right side is the d-transversal product term with factor
    ``K_d^{2d}``, the lower-dimensional terms with factors ``K_m^{2m}`` and
    subspaces spanned by the central normals of each candidate tuple, and
    the single-cap maxima over scales ``delta / K_m``. Zero data give ratio 0.
    """
    d = cap.dim
    if d not in (2, 3):
        raise ValueError("the probe is implemented for d = 2 or 3")
    z = as_points(points, d)
    lhs = np.abs(extension_operator(cap, g, z))
    if not np.any(g.values):
        r = np.zeros(len(z))
        stats = ProbeStats(0.0, 0.0, 0.0, len(z))
        return (stats, r) if return_ratios else stats
    rhs = np.zeros(len(z))
    for m in range(2, d + 1):
        kids = cap_partition(cap, ladder.K[m])
        T = np.array([np.abs(extension_operator(k, g, z)) for k in kids])
        rhs += T.max(axis=0)  # single-cap family at scale delta/K_m
        best = np.zeros(len(z))
        if m == d:
            for combo in _transversal_tuples(kids, m, theta):
                best = np.maximum(best, np.prod(T[list(combo)] ** (1.0 / m), axis=0))
        else:
            finer = cap_partition(cap, ladder.K[m + 1])
            for combo in _transversal_tuples(kids, m, theta):
                V = _span_basis([kids[i].normal() for i in combo])
                sel = v_set_select(cap, finer, V, ladder.K[m + 1])
                parts = []
                for i in combo:
                    members = [u for u in sel if kids[i].contains_cube(u)]
                    if members:
                        mask = np.zeros(len(g.nodes), dtype=bool)
                        for u in members:
                            mask |= _in_cube(g.nodes, u)
                        gv = GridFunction(g.nodes[mask], g.weights[mask], g.values[mask])
                        parts.append(np.abs(extension_operator(kids[i], gv, z)) ** (1.0 / m))
                    else:
                        parts.append(np.zeros(len(z)))
                best = np.maximum(best, np.prod(parts, axis=0))
        rhs += ladder.K[m] ** (2 * m) * best
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(rhs > 0, lhs / np.where(rhs > 0, rhs, 1.0), np.where(lhs > 0, np.inf, 0.0))
    stats = ProbeStats(float(np.max(ratios)), float(np.median(ratios)), float(np.mean(ratios)), len(z))
    return (stats, ratios) if return_ratios else stats


# ---------------------------------------------------------------------------
# reproducing-type majorant in one dimension
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(256)


def _bump_hat(xi):
    xi = np.asarray(xi, dtype=float)
    out = np.zeros_like(xi)
    inside = np.abs(xi) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - xi[inside] ** 2))
    return out


def psi_o(x) -> np.ndarray:
    """Inverse transform of the smooth even bump supported on [-1, 1]."""
    x = np.asarray(x, dtype=float)
    w = _GL_WEIGHTS * _bump_hat(_GL_NODES)
    return (np.cos(np.multiply.outer(x, _GL_NODES)) @ w) / (2.0 * math.pi)


def psi_kernel(x) -> np.ndarray:
    """``psi = psi_o^2 / int psi_o^2``: nonnegative, unit mass, spectrum in [-2, 2]."""
    l2 = float(np.sum(_GL_WEIGHTS * _bump_hat(_GL_NODES) ** 2)) / (2.0 * math.pi)
    return psi_o(x) ** 2 / l2


def reproducing_inequality_check(F, h: float, band, m: int = 1, return_ratio: bool = False,
                                 leakage_tol: float = 0.01):
    """Largest value of ``|F| / (|F|^{1/m} * w_m)^m`` on a periodic grid.

    ``F`` holds samples at spacing ``h`` whose spectrum lies in ``band =
    (lo, hi)`` with ``L = hi - lo``. The kernel is ``w_m(y) = L psi(L y)^{1/m}``
    with psi normalized to unit discrete mass, so ``m = 1`` is a plain
    average and the ratio is unchanged when the grid spacing and the band
    are rescaled together. Convolution is circular, by FFT.
    """
    F = np.asarray(F, dtype=complex).ravel()
    N = len(F)
    if m < 1:
        raise ValueError("m must be >= 1")
    lo, hi = map(float, band)
    L = hi - lo
    if L <= 0:
        raise ValueError("band must have positive length")
    if max(abs(lo), abs(hi)) >= math.pi / h:
        raise ValueError("band exceeds the Nyquist frequency")
    spec = np.fft.fft(F)
    freqs = 2.0 * math.pi * np.fft.fftfreq(N, d=h)
    energy = np.abs(spec) ** 2
    total = float(np.sum(energy))
    if total == 0:
        raise ZeroDataError("F vanishes identically")
    slack = 2.0 * math.pi / (N * h)
    outside = (freqs < lo - slack) | (freqs > hi + slack)
    leak = float(np.sum(energy[outside]) / total)
    if leak > leakage_tol:
        raise ValueError(f"spectral leakage {leak:.3g} exceeds {leakage_tol}")
    y = h * np.fft.fftfreq(N, d=1.0 / N)  # signed circular offsets
    psi = psi_kernel(L * y)
    psi = psi / (h * L * np.sum(psi))
    w = L * psi ** (1.0 / m)
    A = np.abs(F) ** (1.0 / m)
    conv = np.real(np.fft.ifft(np.fft.fft(A) * np.fft.fft(w))) * h
    major = np.clip(conv, 0.0, None) ** m
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(major > 0, np.abs(F) / major, 0.0)
    mx = float(np.max(ratio))
    return (mx, ratio) if return_ratio else mx


def oscillation_factor(func, dual: DualCuboid, K: float, center, n: int = 64, seed: int = 0) -> float:
    """``max / min`` of a positive function over a translate of ``K tau'``.

    Used as the working test of being essentially constant at that scale:
    a factor above 4 is reported as a violation by the caller.
    """
    d = len(dual.dims)
    u = qmc.Sobol(d, scramble=True, seed=seed).random(n) - 0.5
    w = u * dual.dims * K
    pts = np.asarray(center, dtype=float)[None, :] + dual.from_frame(w)
    v = np.asarray(func(pts), dtype=float)
    if np.any(v <= 0):
        return math.inf
    return float(v.max() / v.min())


__all__ = [
    "Phase", "Cap", "DualCuboid", "ScaleLadder", "GridFunction", "ProbeStats", "ZeroDataError",
    "rescale_phase", "osculating_quadratic", "normal_at", "transversality_constant", "wedge_norm",
    "cap_partition", "v_set_select", "rotation_to_last_axis", "dual_cuboid", "zeta_mass",
    "mollifier_zeta", "zeta_truncation_radius", "zeta_samples", "multilinear_constant",
    "build_scale_ladder", "grid_function", "extension_operator", "phi_evaluate",
    "bg_inequality_probe", "psi_o", "psi_kernel", "reproducing_inequality_check",
    "oscillation_factor",
]
