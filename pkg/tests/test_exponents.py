import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fdlab import exponents as E


@pytest.mark.parametrize("alpha, expect", [(0.25, 0.25), (0.5, 0.5), (0.75, 0.5), (1.0, 0.5),
                                           (1.5, 0.75), (2.0, 1.0)])
def test_two_dimensional_table(alpha, expect):
    q = E.beta_lower(2, alpha)
    assert abs(q.value - expect) < 1e-12
    assert E.beta_upper(2, alpha).value == q.value


def test_lower_examples():
    assert E.beta_lower(2, 1.0).provenance.startswith("Wolff")
    q = E.beta_lower(3, 2.0)
    assert q.value == pytest.approx(1.25) and q.provenance == "Erdogan"
    assert E.theorem_lower(3, 2.0) == pytest.approx(7 / 6)
    q = E.beta_lower(10, 9.0)
    assert q.value == pytest.approx(8 + 1 / 90) and q.provenance == "new lower bound"


def test_upper_examples():
    assert E.beta_upper(5, 4.0).value == pytest.approx(3.4)
    assert E.beta_upper(5, 4.0).provenance == "integer points on spheres"
    assert E.beta_upper(3, 1.0).value == pytest.approx(1.0)
    for a in np.linspace(2, 4, 41):
        assert abs(E.theorem_upper(4, a) - E.knapp(4, a)) < 1e-12


def test_range_checks():
    for bad in (0.0, -1.0, 3.5):
        with pytest.raises(ValueError):
            E.beta_lower(3, bad)
    with pytest.raises(ValueError):
        E.beta_lower(3, 1.0, floor="nonsense")
    with pytest.raises(ValueError):
        E.beta_lower(2, 1.0, floor="theorem")


@pytest.mark.parametrize("d", range(2, 11))
def test_continuity_at_breakpoints(d):
    tables = [E.classical_lower(d), E.classical_upper(d)] if d >= 3 else [E._beta2_table()]
    for t in tables:
        assert t.continuity_defect() < 1e-12
        assert t.gaps() == []
    for x in (E.classical_lower(max(d, 3)).breakpoints()):
        if 0 < x <= max(d, 3):
            dd = max(d, 3)
            left = E.beta_lower(dd, x - 1e-13).value
            right = E.beta_lower(dd, min(x + 1e-13, dd)).value
            assert abs(left - right) < 1e-11


def test_rational_breakpoints():
    # Erdogan meets Sjolin at (d+2)/2 and the plateau at d/2, in exact arithmetic
    for d in range(3, 11):
        a = Fraction(d + 2, 2)
        assert a - 1 + (d + 2 - 2 * a) / 4 == a - 1
        b = Fraction(d, 2)
        assert b - 1 + (d + 2 - 2 * b) / 4 == Fraction(d - 1, 2)


@pytest.mark.parametrize("d", range(3, 11))
def test_dominance_and_gap(d):
    for a in E.grid(d):
        lo, up = E.beta_lower(d, a).value, E.beta_upper(d, a).value
        assert lo <= up + 1e-12
        assert up - lo < 5 / 6
        if a < d:
            assert E.theorem_lower(d, a) > E.sjolin(d, a)
        if a >= d / 2 + 2 / 3 + 1 / d:
            assert E.theorem_lower(d, a) >= E.erdogan(d, a) - 1e-12


@pytest.mark.parametrize("d", range(3, 11))
def test_bounds_coincide_at_ends(d):
    assert E.beta_lower(d, float(d)).value == pytest.approx(E.beta_upper(d, float(d)).value)
    a = 0.5 * (d - 1) * 0.9
    assert E.beta_lower(d, a).value == pytest.approx(E.beta_upper(d, a).value)


def test_schrodinger_examples():
    assert E.alpha_upper_schrodinger(2, 0.45).value == pytest.approx(3 - 8 / 3 * 0.45)
    assert E.alpha_upper_schrodinger(3, 0.7).value == pytest.approx(4 - 0.25 - 1.4)
    assert E.alpha_upper_schrodinger(2, 0.75).value == pytest.approx(0.5)
    low = E.alpha_upper_schrodinger(3, 0.3)
    assert low.value == 3 and low.provenance == "Dahlberg-Kenig regime"
    with pytest.raises(ValueError):
        E.alpha_upper_schrodinger(2, 1.5)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 12), frac=st.floats(0.01, 1.0))
def test_schrodinger_in_range(n, frac):
    lo = 0.5 - 1 / (4 * n)
    s = lo + frac * (n / 2 - lo)
    v = E.alpha_upper_schrodinger(n, s).value
    assert 0 <= v <= n
    # never worse than the older bound n + 1 - 2s
    assert v <= n + 1 - 2 * s + 1e-12


@pytest.mark.parametrize("d", [3, 4, 7])
def test_gamma_sjolin_only(d):
    for s in np.linspace(0.55, d / 2 - 0.05, 7):
        assert abs(E.gamma_upper_wave(d, s, "sjolin") - (d + 1 - 2 * s)) < 1e-9


def test_gamma_full_floor():
    for d in range(3, 11):
        assert E.gamma_upper_wave(d, 1.0) < d - 1
    assert E.gamma_upper_wave(2, 0.75) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ValueError):
        E.gamma_upper_wave(3, 1.5)


@pytest.mark.parametrize("d", [3, 5, 8])
def test_gamma_monotone_in_s(d):
    vals = [E.gamma_upper_wave(d, s) for s in np.linspace(0.1, d / 2 - 0.01, 25)]
    assert all(b <= a + 1e-9 for a, b in zip(vals, vals[1:]))


def test_distance_thresholds():
    for d in range(3, 21):
        assert abs(E.distance_set_threshold(d, "erdogan") - (d / 2 + 1 / 3)) < 1e-9
        assert E.distance_set_threshold(d, "full") <= d / 2 + 5 / 12 + 1e-9
        assert E.distance_set_threshold(d, "theorem") <= d / 2 + 5 / 12 + 1e-9
    assert 1.90 < E.distance_set_threshold(3, "theorem") < 1.9167
    assert E.distance_set_threshold(3, "full") == pytest.approx(3 / 2 + 1 / 3, abs=1e-9)


def test_mlinear():
    rng = np.random.default_rng(11)
    for _ in range(20):
        d = int(rng.integers(4, 15))
        a = float(rng.uniform(0.05, d))
        first, second = E.mlinear_terms(d, a, d, "conjectured", extended=True)
        assert abs(first - E.theorem_lower(d, a)) < 1e-10
        assert abs(second - (a - a / d)) < 1e-10
    d, a, m = 6, 3.5, 4
    direct = min(a - 1 + (d - a) * (d + m - 2 * a) / (2 * (m - 1) * (d + m - a - 1)), a - 2 * a / (d + m))
    assert E.conjectural_beta_mlinear(d, a, m) == pytest.approx(direct, rel=1e-15)
    with pytest.raises(ValueError):
        E.conjectural_beta_mlinear(6, 3.0, 6)
    # at full dimension the first term is d - 1; the second, d - 2d/(d+m), is smaller
    for m in (3, 4, 5):
        for v in ("conjectured", "partial"):
            first, second = E.mlinear_terms(6, 6.0, m, v)
            assert first == pytest.approx(5.0)
            assert E.conjectural_beta_mlinear(6, 6.0, m, v) == min(first, second)


def test_s0_branches():
    assert E.schrodinger_s0(1, 1.0).value == pytest.approx(0.25)
    assert E.schrodinger_s0(2, 2.0).value == pytest.approx(3 / 8)
    assert E.schrodinger_s0(2, 2.0).provenance == "high-dimension branch"


def test_scale_identities():
    for d in range(3, 9):
        for a in np.linspace(0.5, d - 0.5, 9):
            lam = E.limiting_scale_exponent(d, a)
            assert E.decay_from_scale(d, a, lam) == pytest.approx(E.theorem_lower(d, a), rel=1e-14)
    assert E.critical_wave_regularity(3, 1.0) == 1.0
    assert math.isclose(E.grid(3, 4)[-1], 3.0)
