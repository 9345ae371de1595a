import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import FIG_ENV, GAMMA_M, ZERO_T, coop_point, random_stable_points
from hybridsense.design import solve_xi_d
from hybridsense.errors import SingularityError
from hybridsense.params import DerivedParams, ModulationSettings, ThermalEnvironment
from hybridsense.response import transfer_functions
from hybridsense.spectra import (added_noise, default_grid, measure_where, mechanical_response,
                                 off_modulation_formulas, on_resonance_formulas, output_spectrum,
                                 sweep, window_around)

SYMMETRIC = np.linspace(-2, 2, 401) * GAMMA_M


def test_empty_interferometer_floor():
    d = DerivedParams(kappa=10.0, gamma_m=2.0, gamma_d=3.0, g=0.0, G=0.0, C0=0.0, C1=0.0)
    tf = transfer_functions(d, ModulationSettings(), np.array([0.0, 1.0, 40.0]))
    np.testing.assert_allclose(output_spectrum(tf, ZERO_T), 0.5, rtol=1e-15)


def test_decomposition_at_dc(curve3):
    tf = transfer_functions(*curve3, 0.0)
    S = output_spectrum(tf, FIG_ENV)
    R = mechanical_response(tf)
    assert S == pytest.approx(R * (1000.5 + added_noise(tf, FIG_ENV)), rel=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 2), st.floats(0, 2), st.floats(0, 1.5), st.floats(0, 1.5),
       st.floats(0, 50), st.floats(0, 50), st.floats(0, 50))
def test_spectrum_positive(C0, C1, xi_m, xi_d, n_c, n_m, n_d):
    tf = transfer_functions(coop_point(C0, C1), ModulationSettings(xi_m, xi_d), SYMMETRIC[1::2])
    assert np.all(output_spectrum(tf, ThermalEnvironment(n_c, n_m, n_d)) > 0)


def test_dc_mechanical_gains():
    bare = transfer_functions(coop_point(0.04, 0.0), ModulationSettings(0.96, 0.0), 0.0)
    assert mechanical_response(bare) == pytest.approx(25.0, rel=1e-10)
    hyb = transfer_functions(coop_point(0.04, 0.5), ModulationSettings(0.98, 1.42), 0.0)
    assert 110 <= mechanical_response(hyb) <= 125
    # exact rational 44100/361
    assert mechanical_response(hyb) == pytest.approx(44100 / 361, rel=1e-10)
    off = transfer_functions(coop_point(0.5, 0.5), ModulationSettings(), 0.0)
    assert mechanical_response(off) == pytest.approx(0.5, rel=1e-12)


def test_added_noise_matched_bare_is_zero():
    tf = transfer_functions(coop_point(0.04, 0.0), ModulationSettings(0.96, 0.0), 0.0)
    assert added_noise(tf, ZERO_T) == pytest.approx(0.0, abs=1e-15)


def test_added_noise_no_atomic_modulation():
    C0, C1, xi_m = 0.04, 0.5, 0.92
    env = ThermalEnvironment(n_c=0.0, n_m=0.0, n_d=2.0)
    tf = transfer_functions(coop_point(C0, C1), ModulationSettings(xi_m, 0.0), 0.0)
    assert added_noise(tf, env) == pytest.approx(C1 / C0 * (1 - xi_m) ** 2 * 2.5, rel=1e-10)


def test_added_noise_curve3():
    tf = transfer_functions(coop_point(0.04, 0.5), ModulationSettings(0.98, 1.42), 0.0)
    n = added_noise(tf, ZERO_T)
    assert 0.005 <= n <= 0.05
    # exact rational 209/14700
    assert n == pytest.approx(209 / 14700, rel=1e-10)


def test_added_noise_dead_transducer():
    d = DerivedParams(kappa=10.0, gamma_m=2.0, gamma_d=3.0, g=0.0, G=0.0, C0=0.0, C1=0.0)
    with pytest.raises(SingularityError):
        added_noise(transfer_functions(d, ModulationSettings(), 0.0), ZERO_T)


def test_on_resonance_at_matching():
    xi_d = solve_xi_d(0.04, 0.5, 0.98)
    n0, R0, amp = on_resonance_formulas(0.04, 0.5, 0.98, xi_d, ZERO_T)
    assert amp == pytest.approx(0.0, abs=1e-12)
    assert R0 == pytest.approx(0.04 / 0.02**2, rel=1e-10)
    assert n0 == pytest.approx(0.02**2 / 0.04 * 0.5 * 0.5 / (1 - xi_d) ** 2, rel=1e-10)


def test_on_resonance_bare_curve():
    assert on_resonance_formulas(0.04, 0.0, 0.96, 0.0, ZERO_T)[1] == pytest.approx(25.0)


def test_on_resonance_singularities():
    with pytest.raises(SingularityError):
        on_resonance_formulas(0.04, 0.0, 1.0, 0.0, ZERO_T)
    with pytest.raises(SingularityError):
        on_resonance_formulas(0.0, 0.5, 0.5, 0.0, ZERO_T)


def test_on_resonance_matches_general_formula():
    rng = np.random.default_rng(7)
    env = ThermalEnvironment(0.3, 10.0, 0.7)
    for d, m in random_stable_points(rng, 50):
        if d.C0 < 1e-6 or abs(1 - m.xi_m) < 1e-6:
            continue
        n0, R0, amp = on_resonance_formulas(d.C0, d.C1, m.xi_m, m.xi_d, env)
        tf = transfer_functions(d, m, 0.0)
        assert R0 == pytest.approx(mechanical_response(tf), rel=1e-8)
        assert n0 == pytest.approx(added_noise(tf, env), rel=1e-8)
        assert amp == pytest.approx(tf.A_coef.real, rel=1e-8, abs=1e-12)


def test_off_modulation_values():
    assert off_modulation_formulas(0.5, 0.5, ZERO_T) == pytest.approx((0.5, 0.5), rel=1e-14)
    assert off_modulation_formulas(1.0, 0.0, ZERO_T) == pytest.approx((0.0, 1.0), abs=1e-15)
    env = ThermalEnvironment(0.2, 3.0, 0.4)
    for C0, C1 in [(0.3, 0.2), (0.9, 1.7)]:
        a = off_modulation_formulas(C0, C1, env)
        b = on_resonance_formulas(C0, C1, 0.0, 0.0, env)
        assert a == pytest.approx(b[:2], rel=1e-12)


def test_matched_curve_gain_diverges():
    C0, C1 = 0.04, 0.5
    R = []
    for xi_m in (0.9, 0.95, 0.98, 0.99):
        n0, R0, _ = on_resonance_formulas(C0, C1, xi_m, solve_xi_d(C0, C1, xi_m), ZERO_T)
        R.append(R0)
        # on the solved curve 1 - xi_d shrinks with 1 - xi_m, leaving
        # n_add(0) = (1 - xi_m - C0)^2 / (2 C0 C1), which tends to C0/(2 C1)
        assert n0 == pytest.approx((1 - xi_m - C0) ** 2 / (2 * C0 * C1), rel=1e-9)
    assert all(np.diff(R) > 0)


def test_added_noise_suppressed_on_matched_family_without_atomic_drive():
    # xi_d = 0, xi_m = 1 - C0/(1 - C1): shrinking C0 pushes xi_m -> 1
    C1 = 0.5
    n = []
    for C0 in (0.1, 0.04, 0.01, 0.001):
        xi_m = 1 - C0 / (1 - C1)
        n0 = on_resonance_formulas(C0, C1, xi_m, 0.0, ZERO_T)[0]
        assert n0 == pytest.approx(C1 / C0 * (1 - xi_m) ** 2 * 0.5, rel=1e-9)
        n.append(n0)
    assert all(np.diff(n) < 0)


def test_sweep_even_in_frequency():
    res = sweep(coop_point(0.04, 0.5), ModulationSettings(0.92, 0.0), FIG_ENV, SYMMETRIC)
    np.testing.assert_allclose(res.R_m, res.R_m[::-1], rtol=1e-12)
    np.testing.assert_allclose(res.n_add, res.n_add[::-1], rtol=1e-12)


def test_sweep_defaults_and_gain_amplitude():
    res = sweep(coop_point(0.04, 0.0), ModulationSettings(0.96, 0.0), FIG_ENV)
    assert len(res.points) == 4001
    np.testing.assert_array_equal(res.omega, default_grid(GAMMA_M))
    mid = res.points[2000]
    assert mid.omega == 0.0 and mid.gain_amplitude == pytest.approx(0.0, abs=1e-12)
    assert res.points[0].gain_amplitude is None


def test_sweep_unstable_warns(caplog):
    res = sweep(coop_point(0.04, 0.5), ModulationSettings(0.98, 1.42), FIG_ENV, SYMMETRIC)
    assert not res.stability.stable
    assert "unstable" in caplog.text
    assert np.all(np.isfinite(res.R_m))


def test_sweep_marks_pole_and_dead_points():
    d = DerivedParams(kappa=10.0, gamma_m=2.0, gamma_d=3.0, g=0.0, G=0.0, C0=0.0, C1=0.0)
    res = sweep(d, ModulationSettings(xi_m=1.0), ZERO_T, np.array([-1.0, 0.0, 1.0]))
    assert "pole" in res.errors[1]
    assert "vanishes" in res.errors[0]
    assert np.isnan(res.n_add).all()


def test_measure_and_window():
    w = np.linspace(-1, 1, 201)
    v = 1 - w**2
    assert measure_where(w, v, 0.75) == pytest.approx(1.0, abs=1e-4)
    lo, hi = window_around(w, v, 0.75)
    assert lo == pytest.approx(-0.5, abs=1e-4) and hi == pytest.approx(0.5, abs=1e-4)
    assert window_around(w, v, 2.0) is None
    assert measure_where(w, v, 0.75, above=False) == pytest.approx(1.0, abs=1e-4)


def test_measure_skips_nan():
    w = np.array([0.0, 1.0, 2.0, 3.0])
    v = np.array([2.0, np.nan, 2.0, 2.0])
    assert measure_where(w, v, 1.0) == 1.0
