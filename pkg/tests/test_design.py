import math
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from conftest import coop_point
from hybridsense.design import (LabRecipe, design_experiment, matching_residual, recipe_system,
                                solve_xi_d, solve_xi_m, verify_operating_point)
from hybridsense.errors import ConfigError, InfeasibleDesignError, SingularityError
from hybridsense.params import ModulationSettings, derive
from hybridsense.spectra import optical_gain_amplitude


def test_solve_xi_d_exact_rational():
    assert solve_xi_d(Fraction(2, 5), Fraction(1, 2), Fraction(21, 25)) == Fraction(4, 3)
    assert solve_xi_d(0.4, 0.5, 0.84) == pytest.approx(4 / 3, rel=1e-14)


def test_solve_xi_d_curve3():
    assert solve_xi_d(Fraction(1, 25), Fraction(1, 2), Fraction(49, 50)) == Fraction(3, 2)


def test_solve_xi_d_bare_is_unconstrained(caplog):
    assert solve_xi_d(0.04, 0.0, 0.96) is None
    assert solve_xi_d(0.04, 0.0, 0.9) is None
    assert "xi_m = 1 - C0" in caplog.text


def test_solve_xi_d_degenerate():
    with pytest.raises(SingularityError):
        solve_xi_d(Fraction(1, 25), Fraction(1, 2), Fraction(24, 25))


def test_cooperativity_sum_warning(caplog):
    solve_xi_d(0.7, 0.5, 0.0)
    assert "exceeds 1" in caplog.text


def test_solve_xi_m_limits():
    assert solve_xi_m(0.04, 0.5, 0.0) == pytest.approx(1 - 0.04 / 0.5)
    assert solve_xi_m(0.04, 0.0, 0.7) == pytest.approx(0.96)
    with pytest.raises(SingularityError):
        solve_xi_m(0.04, 0.5, 1.0)
    with pytest.raises(SingularityError):
        solve_xi_m(0.04, 0.5, 0.5)


@given(st.floats(0.01, 0.9), st.floats(0.01, 0.9), st.floats(-0.5, 0.999))
def test_round_trip(C0, C1, xi_m):
    assume(abs(1 - xi_m - C0) > 1e-3)
    xi_d = solve_xi_d(C0, C1, xi_m)
    assume(abs(1 - xi_d - C1) > 1e-6)
    assert solve_xi_m(C0, C1, xi_d) == pytest.approx(xi_m, rel=1e-12, abs=1e-12)
    assert matching_residual(C0, C1, xi_m, xi_d) == pytest.approx(0.0, abs=1e-12)


def test_residuals_of_quoted_points():
    # curve 3 quotes xi_d = 1.42; the exact solution is 1.5
    assert matching_residual(0.04, 0.5, 0.98, 1.42) == pytest.approx(-2 / 525, rel=1e-12)
    # curve 7 is labelled unmatched
    assert matching_residual(0.04, 0.5, 0.9, 0.2) == pytest.approx(0.0025, rel=1e-10)
    assert matching_residual(0.04, 0.5, 0.98, 1.0) == math.inf
    assert matching_residual(0.04, 0.0, 0.96, 7.0) == pytest.approx(0.0, abs=1e-15)


def test_matched_points_have_zero_optical_gain():
    rng = np.random.default_rng(3)
    checked = 0
    for _ in range(200):
        C0, C1 = rng.uniform(0.01, 0.5, 2)
        xi_m = rng.uniform(0.5, 0.999)
        if abs(1 - xi_m - C0) < 1e-3:
            continue
        xi_d = solve_xi_d(C0, C1, xi_m)
        op = verify_operating_point(coop_point(C0, C1), ModulationSettings(xi_m, xi_d))
        if op.stable:
            checked += 1
            assert optical_gain_amplitude(C0, C1, xi_m, xi_d) ** 2 < 1e-10
    assert checked > 10


def test_verify_operating_point_cooperativity_only(curve3):
    op = verify_operating_point(*curve3)
    assert not op.stable
    assert op.bogoliubov_matched is None and op.red_detuned is None


def test_verify_operating_point_lab_chain(rb_system):
    d = derive(rb_system)
    op = verify_operating_point(d, ModulationSettings(0.98, 1.5))
    assert op.bogoliubov_matched and op.red_detuned


def test_design_consistent_closes_loop(rb_fixed):
    recipe = design_experiment((0.04, 0.5), rb_fixed)
    assert isinstance(recipe, LabRecipe)
    assert recipe.omega_sw == pytest.approx(1e5 - 4 * 23.7e3)
    assert recipe.omega_d == pytest.approx(1e5)
    d = derive(recipe_system(recipe, rb_fixed))
    assert d.C0 == pytest.approx(0.04, rel=1e-2)
    assert d.C1 == pytest.approx(0.5, rel=1e-2)
    assert d.Delta0_bar == pytest.approx(d.omega_m, abs=1.0)


def test_design_rb_detuning_and_laser(rb_fixed):
    recipe = design_experiment((0.04, 0.5), rb_fixed)
    assert recipe.delta_a == pytest.approx(-7.96527e11, rel=1e-3)
    assert recipe.omega_L == pytest.approx(2.41499e15, rel=1e-5)
    # CODATA hbar; the quoted figure corresponds to hbar = 1.055e-34
    assert recipe.delta_a == pytest.approx(-7.96688e11, rel=1e-5)


def test_design_literal_mode_is_infeasible(rb_fixed):
    with pytest.raises(InfeasibleDesignError) as info:
        design_experiment((0.04, 0.5), rb_fixed, mode="literal")
    partial = info.value.recipe
    assert partial["n_cav"] < 0
    assert partial["delta_a"] == pytest.approx(-7.96527e11, rel=1e-3)
    assert partial["omega_L"] == pytest.approx(2.41499e15, rel=1e-5)


def test_design_bare_requires_detuning(rb_fixed):
    with pytest.raises(ConfigError, match="bare system requires explicit atom detuning"):
        design_experiment((0.04, 0.0), rb_fixed)
    recipe = design_experiment((0.04, 0.0), rb_fixed, delta_a=-1e12)
    assert recipe.delta_a == -1e12


def test_design_is_deterministic(rb_fixed):
    assert design_experiment((0.04, 0.5), rb_fixed) == design_experiment((0.04, 0.5), rb_fixed)


def test_design_rejects_bad_inputs(rb_fixed):
    with pytest.raises(ValueError):
        design_experiment((0.04, 0.5), rb_fixed, mode="other")
    with pytest.raises(ValueError):
        design_experiment((0.0, 0.5), rb_fixed)
    with pytest.raises(InfeasibleDesignError):
        design_experiment((0.04, 0.5), replace(rb_fixed, omega_R=3e4))
