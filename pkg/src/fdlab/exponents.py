"""Closed-form exponent bounds as executable piecewise formulas.

Covers the Fourier-decay exponent beta_d(alpha) (lower and upper bounds),
the Schrodinger divergence-set bound alpha_n(s), the wave divergence bound
gamma_d(s) obtained by inverting a beta floor, the distance-set threshold,
the m-linear variants, and the maximal-estimate exponent s_0(n, alpha).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

BISECT_TOL = 1e-12


class NoCrossingError(ValueError):
    """The floor never exceeds the target on (0, d]."""


@dataclass(frozen=True)
class Piece:
    lo: float
    hi: float
    formula: Callable[[float], float]
    name: str
    provenance: str
    lo_closed: bool = True
    hi_closed: bool = True

    def contains(self, x: float, tol: float = 1e-12) -> bool:
        above = x >= self.lo - tol if self.lo_closed else x > self.lo
        below = x <= self.hi + tol if self.hi_closed else x < self.hi
        return above and below


@dataclass(frozen=True)
class PiecewiseBound:
    pieces: tuple
    domain: tuple

    def breakpoints(self) -> list:
        return sorted({p.lo for p in self.pieces} | {p.hi for p in self.pieces})

    def active(self, x: float) -> list:
        return [p for p in self.pieces if p.contains(x)]

    def continuity_defect(self) -> float:
        """Largest jump between adjacent pieces at shared endpoints."""
        worst = 0.0
        for p in self.pieces:
            for q in self.pieces:
                if p is not q and abs(p.hi - q.lo) < 1e-15:
                    worst = max(worst, abs(p.formula(p.hi) - q.formula(q.lo)))
        return worst

    def gaps(self) -> list:
        """Uncovered stretches of the declared domain."""
        lo, hi = self.domain
        cur, out = lo, []
        for p in sorted(self.pieces, key=lambda p: p.lo):
            if p.lo > cur + 1e-15:
                out.append((cur, p.lo))
            cur = max(cur, p.hi)
        if cur < hi - 1e-15:
            out.append((cur, hi))
        return out


@dataclass(frozen=True)
class BoundQuery:
    dim: int
    argument: float
    value: float
    provenance: str


# ---------------------------------------------------------------------------
# the individual formulas
# ---------------------------------------------------------------------------


def mattila(d, a):
    return a


def erdogan(d, a):
    return a - 1.0 + (d + 2.0 - 2.0 * a) / 4.0


def sjolin(d, a):
    return a - 1.0


def theorem_lower(d, a):
    """alpha - 1 + (d - alpha)^2 / ((d - 1)(2d - alpha - 1))."""
    return a - 1.0 + (d - a) ** 2 / ((d - 1.0) * (2.0 * d - a - 1.0))


def knapp(d, a):
    return a - 1.0 + (d - a) / 2.0


def theorem_upper(d, a):
    """alpha - 1 + 2(d - alpha)/d, from integer points on spheres (d >= 4)."""
    return a - 1.0 + 2.0 * (d - a) / d


def limiting_scale_exponent(d, a):
    """lambda = (d - alpha) / (2d - alpha - 1): optimal smallest cap scale R^{-lambda}."""
    return (d - a) / (2.0 * d - a - 1.0)


def decay_from_scale(d, a, lam):
    """Decay exponent delivered by the cap decomposition stopped at scale R^{-lam}.

    The single-cap estimate loses ``R^{alpha/2 - (alpha-1)/2 - lam (d-alpha)/(2(d-1))}``,
    which corresponds to ``beta = alpha - 1 + lam (d - alpha)/(d - 1)``.
    """
    return a - 1.0 + lam * (d - a) / (d - 1.0)


def _beta2_table() -> PiecewiseBound:
    return PiecewiseBound((
        Piece(0.0, 0.5, lambda a: a, "mattila", "Mattila", lo_closed=False),
        Piece(0.5, 1.0, lambda a: 0.5, "plateau", "Wolff"),
        Piece(1.0, 2.0, lambda a: a / 2.0, "wolff", "Wolff"),
    ), (0.0, 2.0))


def classical_lower(d: int) -> PiecewiseBound:
    """The pre-existing lower bounds (Mattila, plateau, Erdogan, Sjolin) for d >= 3."""
    h = 0.5 * (d - 1)
    return PiecewiseBound((
        Piece(0.0, h, lambda a: mattila(d, a), "mattila", "Mattila", lo_closed=False),
        Piece(h, d / 2.0, lambda a: h, "plateau", "Mattila"),
        Piece(d / 2.0, (d + 2) / 2.0, lambda a: erdogan(d, a), "erdogan", "Erdogan"),
        Piece((d + 2) / 2.0, float(d), lambda a: sjolin(d, a), "sjolin", "Sjolin"),
    ), (0.0, float(d)))


def classical_upper(d: int) -> PiecewiseBound:
    return PiecewiseBound((
        Piece(0.0, d - 2.0, lambda a: a, "trivial", "small-set limits", lo_closed=False),
        Piece(d - 2.0, float(d), lambda a: knapp(d, a), "knapp", "Knapp example"),
    ), (0.0, float(d)))


def _check(d: int, a: float, dmin: int = 2):
    if d < dmin:
        raise ValueError(f"d must be >= {dmin}")
    if not (0.0 < a <= d):
        raise ValueError(f"alpha={a} outside (0, {d}]")


def _select(candidates, pick):
    best = pick(v for v, _ in candidates)
    for v, prov in candidates:
        if v == best:
            return v, prov
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# beta_d(alpha)
# ---------------------------------------------------------------------------

FLOORS = ("full", "classical", "theorem", "sjolin", "erdogan", "mattila")


def beta_lower(d: int, alpha: float, floor: str = "full") -> BoundQuery:
    """Best known lower bound for beta_d(alpha).

    ``floor`` selects which bounds enter the pointwise maximum:

    * ``full`` : all classical pieces and the new (d-alpha)^2 bound; for d=2 the sharp table
    * ``classical`` : Mattila / Erdogan / Sjolin pieces only
    * ``theorem`` : the (d-alpha)^2 formula alone, evaluated on all of (0, d]
    * ``sjolin``, ``erdogan``, ``mattila`` : that single formula on all of (0, d]
    """
    _check(d, alpha)
    a = float(alpha)
    if floor == "sjolin":
        return BoundQuery(d, a, sjolin(d, a), "Sjolin")
    if floor == "erdogan":
        return BoundQuery(d, a, erdogan(d, a), "Erdogan")
    if floor == "mattila":
        return BoundQuery(d, a, mattila(d, a), "Mattila")
    if floor == "theorem":
        _check(d, a, 3)
        return BoundQuery(d, a, theorem_lower(d, a), "new lower bound")
    if floor not in ("full", "classical"):
        raise ValueError(f"unknown floor {floor!r}")
    if d == 2:
        p = _beta2_table().active(a)[-1]
        return BoundQuery(d, a, p.formula(a), f"{p.provenance} table")
    cands = [(p.formula(a), p.provenance) for p in classical_lower(d).active(a)]
    if floor == "full":
        cands.append((theorem_lower(d, a), "new lower bound"))
    v, prov = _select(cands, max)
    return BoundQuery(d, a, v, prov)


def beta_upper(d: int, alpha: float) -> BoundQuery:
    """Best known upper bound for beta_d(alpha).

    For d=2 the sharp table is returned: there the generic Knapp piece on
    [d-2, d] = [0, 2] falls below Mattila's sharp value for alpha < 1.
    """
    _check(d, alpha)
    a = float(alpha)
    if d == 2:
        p = _beta2_table().active(a)[-1]
        return BoundQuery(d, a, p.formula(a), f"{p.provenance} table")
    cands = [(p.formula(a), p.provenance) for p in classical_upper(d).active(a)]
    if d >= 4:
        cands.append((theorem_upper(d, a), "integer points on spheres"))
    v, prov = _select(cands, min)
    return BoundQuery(d, a, v, prov)


def beta_table(d: int, alphas) -> list:
    """Rows ``(d, alpha, lower, lower_prov, upper, upper_prov)``."""
    rows = []
    for a in alphas:
        lo, up = beta_lower(d, a), beta_upper(d, a)
        rows.append((d, float(a), lo.value, lo.provenance, up.value, up.provenance))
    return rows


# ---------------------------------------------------------------------------
# Schrodinger and wave divergence sets
# ---------------------------------------------------------------------------


def alpha_upper_schrodinger(n: int, s: float) -> BoundQuery:
    """Upper bound for the dimension alpha_n(s) of Schrodinger divergence sets.

    Below the a.e.-convergence threshold ``s <= 1/2 - 1/(4n)`` only the
    trivial bound ``n`` is available; it is returned with provenance
    ``"Dahlberg-Kenig regime"``.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if not (0.0 < s <= n / 2.0):
        raise ValueError(f"s={s} outside (0, n/2]")
    lo = 0.5 - 1.0 / (4 * n)
    if s <= lo:
        return BoundQuery(n, s, float(n), "Dahlberg-Kenig regime")
    b = 1.0 - 3.0 / (2 * (n + 1))
    pieces = [
        Piece(lo, b, lambda s: n + 1 - (2 + 2.0 / (2 * n - 1)) * s, "bilinear-1", "new bound, first branch",
              lo_closed=False),
        Piece(b, n / 4.0, lambda s: n + 1 - 1.0 / (n + 1) - 2 * s, "bilinear-2", "new bound, second branch",
              hi_closed=False),
        Piece(n / 4.0, n / 2.0, lambda s: n - 2 * s, "sharp", "n - 2s"),
    ]
    cands = [(min(max(p.formula(s), 0.0), float(n)), p.provenance)
             for p in pieces if p.contains(s, tol=0.0)]
    v, prov = _select(cands, min)
    return BoundQuery(n, s, v, prov)


def _bisect_threshold(pred, lo: float, hi: float, tol: float = BISECT_TOL) -> float:
    """Smallest x in (lo, hi] with pred(x) true, assuming pred is monotone."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def gamma_upper_wave(d: int, s: float, floor: str = "full") -> float:
    """Upper bound for gamma_d(s) from ``beta_d(alpha) > d - 2s => gamma_d(s) <= alpha``.

    Returns ``inf{alpha in (0, d] : floor(d, alpha) > d - 2s}`` by bisection,
    or ``d`` when no alpha qualifies.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    if not (0.0 < s < d / 2.0):
        raise ValueError(f"s={s} outside (0, d/2)")
    target = d - 2.0 * s

    def pred(a):
        return beta_lower(d, a, floor).value > target

    if not pred(float(d)):
        return float(d)
    return _bisect_threshold(pred, 0.0, float(d))


def distance_set_threshold(d: int, floor: str = "full") -> float:
    """Smallest alpha with ``floor(d, alpha) > d - alpha`` (Mattila's criterion)."""
    if d < 3:
        raise ValueError("d must be >= 3")

    def pred(a):
        return beta_lower(d, a, floor).value > d - a

    if not pred(float(d)):
        raise NoCrossingError(f"floor {floor!r} never exceeds d - alpha for d={d}")
    return _bisect_threshold(pred, 0.0, float(d))


def mlinear_terms(d: int, alpha: float, m: int, variant: str = "conjectured",
                  extended: bool = False) -> tuple:
    """The two expressions whose minimum is the m-linear lower bound."""
    if d < 4:
        raise ValueError("d must be >= 4")
    top = d if extended else d - 1
    if not (3 <= m <= top):
        raise ValueError(f"m={m} outside [3, {top}]")
    a = float(alpha)
    if variant == "conjectured":
        first = a - 1 + (d - a) * (d + m - 2 * a) / (2 * (m - 1) * (d + m - a - 1))
        second = a - 2 * a / (d + m)
    elif variant == "partial":
        first = a - 1 + (d - a) * (m - a) / ((m - 1) * (2 * m - a - 1))
        second = a - a / m
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return first, second


def conjectural_beta_mlinear(d: int, alpha: float, m: int, variant: str = "conjectured",
                             extended: bool = False) -> float:
    """Lower bounds for beta_d(alpha) from m-linear extension estimates.

    ``conjectured`` assumes the conjectured m-linear estimates; ``partial``
    uses the partial m-linear results already available. ``extended=True``
    admits ``m = d`` for the reduction check against the d-linear bound.
    """
    return min(mlinear_terms(d, alpha, m, variant, extended))


def schrodinger_s0(n: int, alpha: float) -> BoundQuery:
    """Critical regularity s_0(n, alpha) of the fractal maximal estimate."""
    if n < 1 or not (0.0 <= alpha <= n):
        raise ValueError("need n >= 1 and 0 <= alpha <= n")
    first = (n - alpha) / 2.0 + n / (2.0 * (n + 1))
    second = (n - alpha + 1) * (0.5 - 1.0 / (4 * n))
    if first >= second:
        return BoundQuery(n, alpha, first, "low-dimension branch")
    return BoundQuery(n, alpha, second, "high-dimension branch")


def critical_wave_regularity(d: int, beta: float) -> float:
    """Regularity above which the polar-coordinate maximal bound closes: (d - beta)/2."""
    return (d - beta) / 2.0


def grid(d: int, n: int = 1000) -> np.ndarray:
    """``n`` equispaced alphas in (0, d]."""
    return d * np.arange(1, n + 1) / n


__all__ = [
    "Piece", "PiecewiseBound", "BoundQuery", "NoCrossingError", "FLOORS",
    "beta_lower", "beta_upper", "beta_table", "alpha_upper_schrodinger", "gamma_upper_wave",
    "distance_set_threshold", "conjectural_beta_mlinear", "mlinear_terms", "schrodinger_s0",
    "theorem_lower", "theorem_upper", "knapp", "erdogan", "sjolin", "mattila",
    "classical_lower", "classical_upper", "limiting_scale_exponent", "decay_from_scale",
    "critical_wave_regularity", "grid",
]
