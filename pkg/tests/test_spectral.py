import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fdlab import measures as M, spectral as S
from fdlab._util import sphere_area


def test_transform_examples():
    assert S.fourier_transform_measure(M.point_mass(np.zeros(3)), [4.0, -1.0, 2.0]) == 1.0
    a = np.array([0.3, -0.2])
    mu = M.DiscreteMeasure(2, np.array([a, -a]), [0.5, 0.5])
    xi = np.array([1.7, 0.4])
    assert S.fourier_transform_measure(mu, xi).real == pytest.approx(math.cos(xi @ a), abs=1e-15)


def test_transform_of_sphere_is_sinc():
    mu = M.make_sphere_measure(3, 20000)
    for R in (1.0, 2.5, 5.0):
        v = S.fourier_transform_measure(mu, [0.0, 0.0, R])
        assert abs(abs(v) - abs(math.sin(R) / R)) < 2e-3


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-20, 20), min_size=3, max_size=3))
def test_conjugate_symmetry_and_bound(xi):
    mu = M.make_cantor_measure(3, 0.3, 2)
    v = S.fourier_transform_measure(mu, xi)
    w = S.fourier_transform_measure(mu, -np.asarray(xi))
    assert abs(v - np.conj(w)) < 1e-14
    assert abs(v) <= mu.mass + 1e-14


def test_spherical_average_trivial_cases():
    q = S.build_sphere_quadrature(3, 300)
    assert S.spherical_average(M.point_mass(np.zeros(3)), 9.0, q) == pytest.approx(sphere_area(3), rel=1e-12)
    mu = M.make_cantor_measure(3, 0.25, 2)
    assert S.spherical_average(mu, 0.0, q) == pytest.approx(mu.mass ** 2 * sphere_area(3), rel=1e-12)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        S.spherical_average(M.point_mass(np.zeros(2)), 1.0, S.build_sphere_quadrature(3, 10))


def test_sphere_closed_form_envelope():
    mu = M.make_sphere_measure(3, 6000)
    q = S.build_sphere_quadrature(3, 1000)
    for R in (4.3, 8.2, 16.4, 33.1):
        s = S.spherical_average(mu, R, q)
        assert s < 4 * math.pi * 2 / R ** 2
        assert s == pytest.approx(4 * math.pi * (math.sin(R) / R) ** 2, rel=0.1)


def test_quadrature_weights():
    assert S.build_sphere_quadrature(2, 8).total_weight == pytest.approx(2 * math.pi, abs=1e-14)
    q3 = S.build_sphere_quadrature(3, 1000)
    assert np.sum(q3.weights * q3.nodes[:, 0] ** 2) == pytest.approx(4 * math.pi / 3, rel=0.01)
    q4 = S.build_sphere_quadrature(4, 5000, seed=3)
    assert q4.total_weight == pytest.approx(2 * math.pi ** 2, rel=1e-12)
    assert np.allclose(np.linalg.norm(q4.nodes, axis=1), 1, atol=1e-12)


def test_decay_scan_basics():
    q = S.build_sphere_quadrature(2, 64)
    curve = S.decay_scan(M.point_mass(np.zeros(2)), [1.0, 2.0, 5.0], q)
    assert len(curve) == 3
    assert np.allclose(curve.sigma, 2 * math.pi)
    with pytest.raises(ValueError):
        S.decay_scan(M.point_mass(np.zeros(2)), [2.0, 1.0], q)


def test_monte_carlo_scan_records_spread():
    q = S.build_sphere_quadrature(4, 2000, seed=1)
    curve = S.decay_scan(M.make_sphere_measure(4, 500), [2.0, 4.0, 8.0], q)
    assert curve.spread is not None and np.all(curve.spread >= 0)


@settings(max_examples=30, deadline=None)
@given(beta=st.floats(-3.0, 6.0), c=st.floats(0.01, 100.0))
def test_power_law_recovery(beta, c):
    R = np.geomspace(2, 200, 9)
    fit = S.fit_decay_exponent(S.DecayCurve(R, c * R ** -beta))
    assert abs(fit.beta - beta) < 1e-10


def test_fit_guards():
    R = np.array([1.0, 2.0, 4.0, 8.0])
    with pytest.raises(S.QuadratureUnderflow):
        S.fit_decay_exponent(S.DecayCurve(R, np.array([1.0, 0.0, 1.0, 1.0])))
    with pytest.raises(ValueError):
        S.fit_decay_exponent(S.DecayCurve(R, np.ones(4)), window=(0, 2))


def test_fit_window():
    R = np.geomspace(1, 100, 8)
    sig = np.where(R < 10, R ** -1.0, R ** -3.0 * 100)
    assert S.fit_decay_exponent(S.DecayCurve(R, sig), window=(4, 8)).beta == pytest.approx(3.0)


def test_csv_and_json_formats():
    curve = S.DecayCurve(np.array([1.0, 2.0, 4.0]), np.array([1.0, 0.1, 1 / 3]))
    text = curve.to_csv()
    assert text.startswith("R,sigma\r\n")
    back = S.DecayCurve.from_csv(text)
    assert np.array_equal(back.sigma, curve.sigma)
    fit = S.fit_decay_exponent(curve)
    doc = fit.to_json()
    assert list(json.loads(doc)) == ["beta", "residual", "stderr", "window"]


def test_jittered_grid():
    g = S.jittered_dyadic_grid(4, 64, seed=0)
    assert len(g) == 5
    assert np.all(np.abs(g / 2.0 ** np.arange(2, 7) - 1) <= 0.05)
    assert np.array_equal(g, S.jittered_dyadic_grid(4, 64, seed=0))
    h = S.jittered_dyadic_grid(4, 64, seed=0, accept=lambda r: abs(math.sin(r)) >= 0.85)
    assert all(abs(math.sin(r)) >= 0.85 for r in h)


def test_cantor_mattila_floor():
    mu = M.make_cantor_measure(2, 1 / 16, 3)  # nominal alpha 1/2
    q = S.build_sphere_quadrature(2, 512)
    curve = S.decay_scan(mu, S.jittered_dyadic_grid(8, 128, seed=0), q)
    assert S.fit_decay_exponent(curve).beta >= 0.5 - 0.2
