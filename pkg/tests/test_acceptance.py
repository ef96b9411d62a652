"""Acceptance suite: one PASS/FAIL line per criterion.

Run under pytest (lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from fdlab import caps as C, evolution as V, exponents as E, knapp as K
from fdlab import measures as M, regression as G, spectral as S

RESULTS = {}


def _record(num, ok, budget, started, detail):
    elapsed = time.perf_counter() - started
    ok = bool(ok) and elapsed < budget
    RESULTS[num] = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  ({elapsed:.2f}s / {budget:g}s)  {detail}"
    print(RESULTS[num])
    assert ok, RESULTS[num]


def test_c01_two_dimensional_table():
    t0 = time.perf_counter()
    table = {0.25: 0.25, 0.5: 0.5, 0.75: 0.5, 1.0: 0.5, 1.5: 0.75, 2.0: 1.0}
    err = max(abs(E.beta_lower(2, a).value - v) for a, v in table.items())
    defects = []
    for d in range(2, 11):
        tables = [E._beta2_table()] if d == 2 else [E.classical_lower(d), E.classical_upper(d)]
        defects += [t.continuity_defect() for t in tables]
        for x in tables[0].breakpoints():
            if 0 < x < d:
                defects.append(abs(E.beta_lower(d, x - 1e-13).value - E.beta_lower(d, x + 1e-13).value))
    _record(1, err < 1e-12 and max(defects) < 1e-11, 1.0, t0,
            f"table err {err:.1e}, max jump {max(defects):.1e}")


def test_c02_dominance():
    t0 = time.perf_counter()
    worst_sjolin, worst_erd, worst_gap = math.inf, math.inf, 0.0
    for d in range(3, 11):
        for a in E.grid(d):
            if a < d:
                worst_sjolin = min(worst_sjolin, E.theorem_lower(d, a) - E.sjolin(d, a))
            if a >= d / 2 + 2 / 3 + 1 / d:
                worst_erd = min(worst_erd, E.theorem_lower(d, a) - E.erdogan(d, a))
            worst_gap = max(worst_gap, E.beta_upper(d, a).value - E.beta_lower(d, a).value)
    ok = worst_sjolin > 0 and worst_erd >= -1e-12 and worst_gap < 5 / 6
    _record(2, ok, 5.0, t0, f"min margin over Sjolin {worst_sjolin:.2e}, over Erdogan {worst_erd:.2e}, "
                            f"max gap {worst_gap:.4f}")


def test_c03_d4_coincidence():
    t0 = time.perf_counter()
    err = max(abs(E.theorem_upper(4, a) - E.knapp(4, a)) for a in E.grid(4))
    _record(3, err < 1e-12, 5.0, t0, f"max |upper - Knapp| = {err:.1e}")


def test_c04_thresholds():
    t0 = time.perf_counter()
    erd = max(abs(E.distance_set_threshold(d, "erdogan") - (d / 2 + 1 / 3)) for d in range(3, 21))
    full = max(E.distance_set_threshold(d, "full") - (d / 2 + 5 / 12) for d in range(3, 21))
    sj = max(abs(E.gamma_upper_wave(d, s, "sjolin") - (d + 1 - 2 * s))
             for d in range(3, 11) for s in np.linspace(0.55, d / 2 - 0.05, 7))
    gam = max(E.gamma_upper_wave(d, 1.0) - (d - 1) for d in range(3, 11))
    ok = erd <= 1e-9 and full <= 1e-9 and sj < 1e-9 and gam < 0
    _record(4, ok, 10.0, t0, f"Erdogan err {erd:.1e}, full excess {full:.3f}, Sjolin err {sj:.1e}, "
                             f"gamma(1)-(d-1) max {gam:.3f}")


def test_c05_mlinear():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    errs = []
    for _ in range(20):
        d = int(rng.integers(4, 13))
        a = float(rng.uniform(0.05, d))
        errs.append(abs(E.conjectural_beta_mlinear(d, a, d, extended=True) - E.theorem_lower(d, a)))
    _record(5, max(errs) < 1e-10, 5.0, t0, f"max err {max(errs):.1e} over 20 random (d, alpha)")


def test_c06_spectral_pipeline():
    t0 = time.perf_counter()
    mu = M.make_sphere_measure(3, 10_000)
    q = S.build_sphere_quadrature(3, 2000)
    grid = S.jittered_dyadic_grid(4, 64, seed=0, accept=lambda r: abs(math.sin(r)) >= 0.85)
    beta = S.fit_decay_exponent(S.decay_scan(mu, grid, q)).beta
    rng = np.random.default_rng(6)
    R = np.geomspace(2, 200, 9)
    synth = max(abs(S.fit_decay_exponent(S.DecayCurve(R, c * R ** -b)).beta - b)
                for b, c in zip(rng.uniform(-3, 6, 50), rng.uniform(0.01, 100, 50)))
    _record(6, abs(beta - 2) <= 0.1 and synth < 1e-10, 60.0, t0,
            f"sphere beta {beta:.4f}, synthetic err {synth:.1e}")


def test_c07_knapp():
    t0 = time.perf_counter()
    reps = [K.knapp_pipeline(K.KnappConfig(d=4, n=n, kappa=0.5, rho=0.01, epsilon=0.01), phase_samples=10_000)
            for n in (1, 2, 3)]
    contain = min(r.containment_fraction for r in reps)
    ext = min(r.min_extension_ratio for r in reps)
    mass = [r.mu_mass / r.mu_mass_reference for r in reps]
    beta = K.implied_beta_fit(reps)
    ok = contain == 1.0 and ext >= 0.9 and beta <= 2.3 and all(0.25 <= m <= 4 for m in mass)
    _record(7, ok, 120.0, t0, f"containment {contain:.3f}, extension {ext:.4f}, implied beta {beta:.3f}, "
                              f"mass ratios {[round(m, 3) for m in mass]}")


def test_c08_number_theory():
    t0 = time.perf_counter()
    bad = [n for n in range(1, 13)
           if len(K.sum_of_squares_points(4, n)) != K.jacobi_r4(n)
           or len(K.sum_of_squares_points(4, n * n)) != K.jacobi_r4(n * n)]
    r3 = len(K.sum_of_squares_points(3, 7))
    _record(8, not bad and r3 == 0, 10.0, t0, f"r4 mismatches {bad}, r3(7) = {r3}")


def test_c09_c_alpha():
    t0 = time.perf_counter()
    worst = 0.0
    for d, (R1, R2) in ((2, (128, 256)), (3, (64, 128))):
        for kappa in (1 / 3, 1 / 2, 2 / 3):
            alpha = d * (1 - kappa)
            vals = []
            for R in (R1, R2):
                mu = M.make_lattice_measure(d, R, kappa, 0.5)
                vals.append(M.c_alpha_estimate(mu, alpha, M.dyadic_radii(0.5 / R, 2.0),
                                               extra_centers=[[0.0] * d], max_centers=2000).value)
            slope = math.log2(vals[1] / vals[0])
            worst = max(worst, abs(slope - max(-d * kappa, alpha - d)))
    mu = M.make_cantor_measure(2, 0.2, 3)
    radii = M.dyadic_radii(1e-3, 2.0)
    cov = 0.0
    for R, a in ((1.0, 0.7), (3.5, 1.2), (40.0, 2.0)):
        x = M.c_alpha_estimate(mu, a, radii).value
        y = M.c_alpha_estimate(M.scale_measure(mu, R, a), a, [R * r for r in radii]).value
        cov = max(cov, abs(x - y) / x)
    _record(9, worst < 0.3 and cov <= 1e-12, 60.0, t0,
            f"max exponent error {worst:.3f}, covariance rel err {cov:.1e}")


def test_c10_cap_engine():
    t0 = time.perf_counter()
    rng = np.random.default_rng(10)
    wedge = 0.0
    for _ in range(100):
        d = int(rng.integers(2, 7))
        Vm = rng.standard_normal((d, d))
        Vm /= np.linalg.norm(Vm, axis=1, keepdims=True)
        wedge = max(wedge, abs(C.wedge_norm(Vm) - abs(np.linalg.det(Vm))))
    para = C.Phase("paraboloid")
    g = rng.uniform(-0.35, 0.35, (200, 2))
    fixed = 0.0
    for _ in range(20):
        ph = C.rescale_phase(para, rng.uniform(-0.3, 0.3, 2), rng.uniform(0.01, 1.0))
        ph = C.rescale_phase(ph, rng.uniform(-0.2, 0.2, 2), rng.uniform(0.05, 1.0))
        fixed = max(fixed, float(np.max(np.abs(ph.value_grad(g)[0] + np.sum(g ** 2, axis=1)))))
    cap = C.Cap.centered(para, [Fraction(0), Fraction(0)], Fraction(1, 2))
    kids = C.cap_partition(cap, 4)
    tiling = (sum(k.side ** 2 for k in kids) == cap.side ** 2
              and len({k.lower for k in kids}) == len(kids) and all(cap.contains_cube(k) for k in kids))
    ladders = all(lad.monotone() and lad.below_R_eps()
                  for lad in (C.build_scale_ladder(R, eps, d) for R in (2.0 ** 20, 2.0 ** 40, 1e30)
                              for eps in (0.01, 0.05, 0.1, 0.3) for d in (2, 3, 5)))
    ok = wedge < 1e-10 and fixed < 1e-12 and tiling and ladders
    _record(10, ok, 30.0, t0, f"wedge err {wedge:.1e}, fixed-point err {fixed:.1e}, tiling {tiling}, "
                              f"ladders {ladders}")


def test_c11_evolution():
    t0 = time.perf_counter()
    gauss = 0.0
    for n in (1, 2):
        f = V.gaussian_datum(n, 1.0, h=0.05 if n == 1 else 0.1)
        x = np.random.default_rng(n).uniform(-3, 3, (12, n))
        for t in (0.0, 0.1, 1.0):
            gauss = max(gauss, float(np.max(np.abs(V.truncated_propagator(f, 2, t, x)
                                                   - V.gaussian_evolution(x, t, 1.0, n)))))
    dal = 0.0
    nodes = V.frequency_lattice(1, 0.02, 12.0)
    for seed in range(10):
        rng = np.random.default_rng(seed)
        a, b, c = rng.uniform(0.5, 2.0, 3), rng.uniform(-4, 4, 3), rng.standard_normal(3)
        v0 = V.FrequencyDatum(1, nodes, np.sum(c * np.exp(-a * (nodes - b) ** 2), axis=1), 0.02)
        v1 = v0.with_values(np.zeros(len(nodes)))
        x = rng.uniform(-5, 5, 8)

        def v0_at(y):
            y = y[:, None]
            return np.sum(c * np.sqrt(math.pi / a) * np.exp(1j * y * b - y ** 2 / (4 * a)), axis=1) / math.sqrt(2 * math.pi)

        for t in (0.7, 2.0):
            got = V.wave_solution(v0, v1, t, x[:, None])
            dal = max(dal, float(np.max(np.abs(got - 0.5 * (v0_at(x + t) + v0_at(x - t))))))
    f = V.gaussian_datum(1, 1.0, h=0.025)
    xs = np.arange(-40.0, 40.0, 0.1)[:, None]
    norms = [math.sqrt(np.sum(np.abs(V.truncated_propagator(f, 2, t, xs)) ** 2) * 0.1) for t in (0.0, 1.0, 3.0)]
    energy = max(norms) / min(norms) - 1
    mu = M.make_grid_measure(1, 512, 0.0, 1.0)
    fit = V.maximal_scaling_fit(1, mu, 1.0, [16, 32, 64, 128, 256], seeds=range(8))
    ok = gauss < 1e-6 and dal < 1e-6 and energy < 0.01 and 0.05 <= fit.slope <= 0.40
    _record(11, ok, 300.0, t0, f"Gaussian err {gauss:.1e}, d'Alembert err {dal:.1e}, energy drift {energy:.1e}, "
                               f"maximal slope {fit.slope:.3f} (s0 = {fit.s0})")


def test_c12_diagnostics_stability():
    t0 = time.perf_counter()
    drift = G.compare(G.medians(G.CHECK_SEEDS), G.load_baselines())
    ok = all(v[1] for v in drift.values())
    _record(12, ok, 120.0, t0, ", ".join(f"{k} drift {v[0]:.1%}" for k, v in sorted(drift.items())))


if __name__ == "__main__":
    for name, fn in sorted((k, v) for k, v in dict(globals()).items() if k.startswith("test_c")):
        try:
            fn()
        except AssertionError:
            pass
