import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fdlab import measures as M
from fdlab._util import ball_volume


def test_lattice_counts_d2():
    mu = M.make_lattice_measure(2, 4.0, 0.5, 0.5)
    assert mu.meta["spacing"] == pytest.approx(0.5)
    # integer pairs with |z| <= 2
    assert mu.meta["n_centers"] == 13
    assert mu.mass == pytest.approx(13 * math.pi * (1 / 8) ** 2, rel=1e-12)


def test_lattice_unit_spacing_limit():
    for d in (2, 3, 4):
        mu = M.make_lattice_measure(d, 1.0001, 0.9999, 0.5)
        assert mu.meta["n_centers"] == 2 * d + 1


def test_lattice_rejects_out_of_range():
    with pytest.raises(ValueError):
        M.make_lattice_measure(2, 0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        M.make_lattice_measure(2, 4.0, 1.0, 0.5)


@pytest.mark.parametrize("spb", [1, 5, 17])
def test_lattice_mass_and_support(spb):
    mu = M.make_lattice_measure(3, 8.0, 0.5, 0.5, samples_per_ball=spb)
    expect = mu.meta["n_centers"] * ball_volume(3) * (0.5 / 8.0) ** 3
    assert abs(mu.mass - expect) <= 1e-12 * expect
    assert np.max(np.linalg.norm(mu.points, axis=1)) <= 1 + 1e-12


def test_cantor_examples():
    a = M.make_cantor_measure(1, 0.25, 1)
    assert len(a) == 2 and np.allclose(a.weights, 0.5)
    assert a.meta["nominal_alpha"] == pytest.approx(0.5)
    b = M.make_cantor_measure(1, 0.25, 3)
    assert len(b) == 8 and np.allclose(b.weights, 1 / 8)
    c = M.make_cantor_measure(2, 0.25, 2)
    assert len(c) == 16 and c.meta["nominal_alpha"] == pytest.approx(1.0)
    assert abs(c.mass - 1) < 1e-12
    assert np.max(np.linalg.norm(c.points, axis=1)) <= 1 + 1e-12


def test_cantor_rejects_bad_ratio():
    with pytest.raises(ValueError):
        M.make_cantor_measure(1, 0.5, 2)


def test_sphere_measures():
    mu = M.make_sphere_measure(2, 4)
    ang = np.sort(np.mod(np.arctan2(mu.points[:, 1], mu.points[:, 0]), 2 * np.pi))
    assert np.allclose(ang, [0, np.pi / 2, np.pi, 3 * np.pi / 2])
    s3 = M.make_sphere_measure(3, 1000)
    assert abs(np.sum(s3.weights * s3.points[:, 2] ** 2) - 1 / 3) < 0.01
    s5 = M.make_sphere_measure(5, 300)
    assert np.allclose(np.linalg.norm(s5.points, axis=1), 1.0)
    assert np.array_equal(s5.points, M.make_sphere_measure(5, 300).points)


def test_c_alpha_point_mass():
    rep = M.c_alpha_estimate(M.point_mass(np.zeros(2)), 1.0, [1.0])
    assert rep.value == 1.0 and rep.witness_radius == 1.0
    assert np.array_equal(rep.witness_center, [0.0, 0.0])


def test_c_alpha_rejects_empty_radii():
    with pytest.raises(ValueError):
        M.c_alpha_estimate(M.point_mass([0.0]), 0.5, [])


@pytest.mark.parametrize("d", [2, 3])
def test_c_alpha_lebesgue_ball(d):
    mu = M.make_grid_measure(d, 60 if d == 2 else 30, clip_to_ball=True)
    rep = M.c_alpha_estimate(mu, float(d), [1.0], extra_centers=[np.zeros(d)])
    assert rep.value == pytest.approx(ball_volume(d), rel=0.05)


def test_c_alpha_witness_is_consistent():
    mu = M.make_cantor_measure(2, 0.25, 3)
    radii = M.dyadic_radii(1e-3, 2.0)
    rep = M.c_alpha_estimate(mu, 1.0, radii)
    mass = M.ball_masses(mu, rep.witness_center[None, :], rep.witness_radius)[0]
    assert rep.value == pytest.approx(mass / rep.witness_radius, rel=1e-14)


def test_scale_examples():
    mu = M.make_cantor_measure(2, 0.25, 2)
    nu = M.scale_measure(mu, 1.0, 1.0)
    assert np.array_equal(mu.points, nu.points) and np.array_equal(mu.weights, nu.weights)
    p = M.scale_measure(M.point_mass([0.5, 0.0]), 2.0, 1.0)
    assert np.allclose(p.points, [[1.0, 0.0]]) and p.mass == pytest.approx(2.0)
    assert p.expanded_support


@settings(max_examples=25, deadline=None)
@given(R=st.floats(1.0, 50.0), alpha=st.floats(0.2, 2.0))
def test_scale_covariance(R, alpha):
    mu = M.make_cantor_measure(2, 0.2, 3)
    radii = M.dyadic_radii(1e-3, 2.0)
    a = M.c_alpha_estimate(mu, alpha, radii).value
    b = M.c_alpha_estimate(M.scale_measure(mu, R, alpha), alpha, [R * r for r in radii]).value
    assert abs(a - b) <= 1e-12 * a


def test_json_roundtrip(tmp_path):
    mu = M.make_lattice_measure(2, 4.0, 0.5, 0.5, samples_per_ball=3)
    path = tmp_path / "mu.json"
    mu.save(path)
    back = M.DiscreteMeasure.load(path)
    assert back.d == mu.d and back.label == mu.label
    assert np.array_equal(back.points, mu.points) and np.array_equal(back.weights, mu.weights)


def test_measure_validation():
    with pytest.raises(ValueError):
        M.DiscreteMeasure(2, np.zeros((3, 2)), [1.0, -1.0, 1.0])
