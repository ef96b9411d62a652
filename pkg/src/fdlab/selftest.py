"""Quick assertion suite over the elementary identities of every module.

Each check is a small function returning ``(ok, detail)``; ``run_all``
collects them in a fixed order.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import caps, evolution, exponents, knapp, measures, spectral
from ._util import sphere_area


def _close(a, b, tol):
    return abs(a - b) <= tol, f"{a!r} vs {b!r}"


def check_lattice_unit_spacing():
    mu = measures.make_lattice_measure(3, 1.0001, 0.999, 0.5)
    return mu.meta["n_centers"] == 7, f"centers={mu.meta['n_centers']}"


def check_cantor_counts():
    a = measures.make_cantor_measure(1, 0.25, 1)
    b = measures.make_cantor_measure(1, 0.25, 3)
    ok = len(a) == 2 and np.allclose(a.weights, 0.5) and len(b) == 8 and np.allclose(b.weights, 1 / 8)
    return ok, f"{len(a)}, {len(b)} points"


def check_sphere_measure_d2():
    mu = measures.make_sphere_measure(2, 4)
    ang = np.sort(np.mod(np.arctan2(mu.points[:, 1], mu.points[:, 0]), 2 * np.pi))
    return np.allclose(ang, [0, np.pi / 2, np.pi, 3 * np.pi / 2]) and _close(mu.mass, 1.0, 1e-15)[0], str(ang)


def check_point_mass_c_alpha():
    rep = measures.c_alpha_estimate(measures.point_mass(np.zeros(2)), 1.0, [1.0])
    return rep.value == 1.0 and rep.witness_radius == 1.0, f"value={rep.value}"


def check_scale_identity():
    mu = measures.make_cantor_measure(2, 0.25, 2)
    nu = measures.scale_measure(mu, 1.0, 1.0)
    return np.array_equal(mu.points, nu.points) and np.array_equal(mu.weights, nu.weights), "R=1"


def check_scale_point():
    nu = measures.scale_measure(measures.point_mass([0.5, 0.0]), 2.0, 1.0)
    return np.allclose(nu.points, [[1.0, 0.0]]) and np.isclose(nu.mass, 2.0), str(nu.points)


def check_fourier_origin():
    v = spectral.fourier_transform_measure(measures.point_mass(np.zeros(3)), [1.0, 2.0, 3.0])
    return _close(abs(v - 1.0), 0.0, 1e-15)


def check_fourier_pair():
    a = np.array([0.3, -0.2])
    mu = measures.DiscreteMeasure(2, np.array([a, -a]), [0.5, 0.5])
    xi = np.array([1.7, 0.4])
    return _close(spectral.fourier_transform_measure(mu, xi).real, math.cos(xi @ a), 1e-15)


def check_sigma_trivial():
    quad = spectral.build_sphere_quadrature(3, 200)
    s = spectral.spherical_average(measures.point_mass(np.zeros(3)), 7.0, quad)
    return _close(s, sphere_area(3), 1e-9)


def check_quadrature_sums():
    q2 = spectral.build_sphere_quadrature(2, 8)
    q4 = spectral.build_sphere_quadrature(4, 5000, seed=1)
    ok = abs(q2.total_weight - 2 * math.pi) < 1e-12 and abs(q4.total_weight - 2 * math.pi ** 2) < 1e-9
    return ok, f"{q2.total_weight}, {q4.total_weight}"


def check_power_law_fit():
    R = np.geomspace(2, 64, 6)
    fit = spectral.fit_decay_exponent(spectral.DecayCurve(R, R ** -2.0))
    const = spectral.fit_decay_exponent(spectral.DecayCurve(R, np.full(6, 5.0)))
    return abs(fit.beta - 2) < 1e-10 and abs(const.beta) < 1e-10, f"{fit.beta}, {const.beta}"


def check_full_dimension_mlinear():
    firsts = [exponents.mlinear_terms(6, 6.0, m, v)[0] for m in (3, 4, 5)
              for v in ("conjectured", "partial")]
    return all(abs(v - 5.0) < 1e-12 for v in firsts), str(firsts)


def check_unit_vectors_r4():
    return len(knapp.sum_of_squares_points(4, 1)) == 8, "r4(1)"


def check_phase_zero_offsets():
    pt = knapp.phase_decomposition([1, 0, 0, 0], np.zeros(4), [2, 1, 0, 0], np.zeros(4),
                                   (2 * math.pi) ** 2, 0.5)
    return pt.I2 == pt.I3 == pt.I4 == 0.0 and pt.winding == 2, str(pt)


def check_normals():
    P = caps.Phase("paraboloid")
    S = caps.Phase("sphere")
    a = np.allclose(caps.normal_at(P, [0.0, 0.0]), [0, 0, 1])
    xi = np.array([0.5, 0.0])
    b = np.allclose(caps.normal_at(S, xi), [0.5, 0.0, math.sqrt(0.75)])
    return a and b, "paraboloid origin, sphere edge"


def check_wedges():
    a = caps.wedge_norm([[1, 0, 0], [0, 1, 0]])
    b = caps.wedge_norm([[1, 0, 0], [1, 0, 0]])
    return abs(a - 1) < 1e-15 and abs(b) < 1e-15, f"{a}, {b}"


def check_cap_partition():
    cap = caps.Cap.centered(caps.Phase("paraboloid"), [Fraction(0), Fraction(0)], Fraction(1, 2))
    kids = caps.cap_partition(cap, 2)
    area = sum(k.side ** 2 for k in kids)
    return len(kids) == 4 and area == cap.side ** 2, f"{len(kids)} children"


def check_extension_unit():
    cap = caps.Cap.centered(caps.Phase("paraboloid"), [Fraction(0), Fraction(0)], Fraction(1, 4))
    g = caps.grid_function(cap, 4)
    v = caps.extension_operator(cap, g, [0.0, 0.0], 0.0)
    return _close(v.real, 1 / 16, 1e-15)


def check_ladder():
    lad = caps.build_scale_ladder(2.0 ** 40, 0.1, 3)
    return lad.monotone() and lad.below_R_eps(), str(lad.scales)


def check_propagator_zero():
    f = evolution.gaussian_datum(1, 1.0)
    z = f.with_values(np.zeros(len(f.values)))
    return evolution.truncated_propagator(z, 2, 0.3, [0.1]) == 0, "zero data"


def check_multiplier_identity():
    f = evolution.gaussian_datum(2, 1.0, h=0.25)
    g = evolution.bessel_riesz_multiplier(f, 0.0)
    back = evolution.bessel_riesz_multiplier(evolution.bessel_riesz_multiplier(f, 0.7), -0.7)
    return np.array_equal(f.values, g.values) and np.allclose(back.values, f.values, atol=1e-14, rtol=0), "s=0"


CHECKS = [
    check_lattice_unit_spacing, check_cantor_counts, check_sphere_measure_d2, check_point_mass_c_alpha,
    check_scale_identity, check_scale_point, check_fourier_origin, check_fourier_pair,
    check_sigma_trivial, check_quadrature_sums, check_power_law_fit, check_full_dimension_mlinear,
    check_unit_vectors_r4, check_phase_zero_offsets, check_normals, check_wedges,
    check_cap_partition, check_extension_unit, check_ladder, check_propagator_zero,
    check_multiplier_identity,
]


def run_all():
    out = []
    for fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append((fn.__name__.removeprefix("check_"), bool(ok), detail))
    return out
