"""Impedance matching, operating-point audit, and the laboratory parameter chain."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, replace

from .dynamics import StabilityReport, build_drift_matrix, stability_eigen
from .errors import ConfigError, InfeasibleDesignError, SingularityError
from .params import (DerivedParams, ModulationSettings, SystemParams, optomechanical_coupling,
                     single_photon_couplings)

log = logging.getLogger(__name__)

RED_DETUNING_RTOL = 1e-5  # Delta0 is a difference of ~1e15 rad/s numbers; ulp ~ 0.5 rad/s


def _warn_cooperativity_sum(C0, C1):
    if C0 + C1 > 1:
        log.warning("C0 + C1 = %g exceeds 1; outside the matched-amplifier regime", C0 + C1)


def solve_xi_d(C0, C1, xi_m):
    """Bogoliubov modulation depth that zeroes the on-resonance optical gain.

    Solves ``C0 + (xi_m - 1)(1 - C1/(1 - xi_d)) = 0`` exactly. Plain
    arithmetic is used, so ``fractions.Fraction`` inputs give exact results.
    Returns ``None`` when ``C1 == 0``: the condition no longer involves
    ``xi_d`` and reduces to ``xi_m = 1 - C0``.
    """
    _warn_cooperativity_sum(C0, C1)
    if C1 == 0:
        if xi_m != 1 - C0:
            log.warning("C1 = 0: matching requires xi_m = 1 - C0 = %g, got %g", 1 - C0, xi_m)
        return None
    slack = (1 - xi_m) - C0
    if slack == 0:
        raise SingularityError(
            "degenerate matching: 1 - xi_m == C0 leaves xi_d undetermined "
            "(the mechanical channel alone is matched)", value=xi_m)
    return 1 - C1 * (1 - xi_m) / slack


def solve_xi_m(C0, C1, xi_d):
    """Mechanical modulation depth satisfying the matching condition for given ``xi_d``."""
    _warn_cooperativity_sum(C0, C1)
    if xi_d == 1:
        raise SingularityError("matching condition undefined at xi_d = 1", value=xi_d)
    bracket = 1 - C1 / (1 - xi_d)
    if bracket == 0:
        raise SingularityError("1 - C1/(1 - xi_d) vanishes; no xi_m solves the matching",
                               value=xi_d)
    return 1 - C0 / bracket


def matching_residual(C0, C1, xi_m, xi_d):
    """Left-hand side of the impedance-matching condition (zero when matched)."""
    if C1 == 0:
        return C0 + (xi_m - 1)
    if xi_d == 1:
        return math.inf
    return C0 + (xi_m - 1) * (1 - C1 / (1 - xi_d))


@dataclass(frozen=True)
class OperatingPoint:
    C0: float
    C1: float
    xi_m: float
    xi_d: float
    matching_residual: float
    stable: bool
    stability: StabilityReport
    bogoliubov_matched: bool | None = None  # omega_d == omega_m
    red_detuned: bool | None = None  # Delta0_bar == omega_d


def _rel_close(a, b, rtol):
    return abs(a - b) <= rtol * max(abs(a), abs(b))


def verify_operating_point(derived: DerivedParams, mods: ModulationSettings,
                           rtol=RED_DETUNING_RTOL) -> OperatingPoint:
    """Audit matching, stability and (when lab fields exist) the red-detuned chain."""
    report = stability_eigen(build_drift_matrix(derived, mods))
    residual = matching_residual(derived.C0, derived.C1, mods.xi_m, mods.xi_d)
    bog = red = None
    if derived.omega_d_eff is not None and derived.omega_m is not None:
        bog = _rel_close(derived.omega_d_eff, derived.omega_m, rtol)
    if derived.Delta0_bar is not None and derived.omega_d_eff is not None:
        red = _rel_close(derived.Delta0_bar, derived.omega_d_eff, rtol)
    return OperatingPoint(
        C0=derived.C0, C1=derived.C1, xi_m=mods.xi_m, xi_d=mods.xi_d,
        matching_residual=residual, stable=report.stable, stability=report,
        bogoliubov_matched=bog, red_detuned=red,
    )


@dataclass(frozen=True)
class LabRecipe:
    """Laboratory settings that realize target cooperativities.

    Angular quantities are in rad/s. ``omega_c`` is the cavity frequency
    the recipe assumes; in ``consistent`` mode it is retuned so that the
    red-detuned condition holds at the computed photon number.
    """

    mode: str
    C0_target: float
    C1_target: float
    omega_sw: float
    omega_d: float
    delta_a: float
    omega_L: float
    U0: float
    g0: float
    G0: float
    x_zp: float
    Delta0: float
    n_cav: float
    E_L: float
    omega_c: float
    omega_c_shift: float

    def as_dict(self):
        return asdict(self)


DESIGN_MODES = ("literal", "consistent")


def design_experiment(target, fixed: SystemParams, mode="consistent", delta_a=None) -> LabRecipe:
    """Convert target ``(C0, C1)`` into drive and trap settings.

    Steps shared by both modes: ``omega_sw = omega_m - 4 omega_R`` (so that
    ``omega_d = omega_m``); atom detuning from the cooperativity ratio,
    ``delta_a = -(g_a^2/g0) sqrt(N gamma_m C0 / (8 gamma_d C1))``; and
    ``omega_L = omega_a - delta_a``.

    ``mode="literal"`` then fixes the photon number by the red-detuned
    condition at the given cavity frequency,
    ``n = omega_m (Delta0 - omega_m) / (2 (g0^2 + G0^2))``. This pins C0 and
    C1 individually to values that generally differ from the targets.

    ``mode="consistent"`` takes the photon number from the target,
    ``n = C0 kappa gamma_m / (4 g0^2)``, and instead retunes the cavity so
    that ``Delta0_bar = omega_m`` holds.

    In both modes ``E_L = sqrt(n (kappa^2/4 + omega_m^2))``.
    """
    C0, C1 = target
    if mode not in DESIGN_MODES:
        raise ValueError(f"mode must be one of {DESIGN_MODES}, got {mode!r}")
    if not C0 > 0:
        raise ValueError("target C0 must be positive")
    _warn_cooperativity_sum(C0, C1)
    p = fixed

    omega_sw = p.omega_m - 4.0 * p.omega_R
    if omega_sw <= 0:
        raise InfeasibleDesignError(
            f"omega_m <= 4 omega_R: no positive s-wave frequency matches omega_d to omega_m "
            f"(omega_sw = {omega_sw:.6g} rad/s)")
    omega_d = 4.0 * p.omega_R + omega_sw

    if C1 > 0:
        _, g0 = optomechanical_coupling(p)
        delta_a = -(p.g_a**2 / g0) * math.sqrt(p.n_atoms * p.gamma_m * C0
                                                 / (8.0 * p.gamma_d * C1))
    elif delta_a is None:
        raise ConfigError("bare system requires explicit atom detuning or no BEC section")
    x_zp, g0, U0, G0 = single_photon_couplings(p, delta_a)
    omega_L = p.omega_a - delta_a
    Delta_c = p.omega_c - omega_L
    shift = p.n_atoms * U0 / 2.0
    coupling_sq = g0**2 + G0**2

    if mode == "literal":
        omega_c = p.omega_c
        Delta0 = Delta_c + shift
        n_cav = (p.omega_m * Delta0 - p.omega_m**2) / (2.0 * coupling_sq)
    else:
        n_cav = C0 * p.kappa * p.gamma_m / (4.0 * g0**2)
        Delta0 = p.omega_m + 2.0 * n_cav * coupling_sq / p.omega_m
        omega_c = omega_L + Delta0 - shift

    partial = dict(mode=mode, C0_target=C0, C1_target=C1, omega_sw=omega_sw, omega_d=omega_d,
                   delta_a=delta_a, omega_L=omega_L, U0=U0, g0=g0, G0=G0, x_zp=x_zp,
                   Delta0=Delta0, n_cav=n_cav, omega_c=omega_c,
                   omega_c_shift=omega_c - p.omega_c)
    if n_cav < 0:
        raise InfeasibleDesignError(
            f"negative intracavity photon number n_cav = {n_cav:.6g}: the cavity is "
            f"blue of the red-detuned point (Delta0 = {Delta0:.6g} rad/s < omega_m)",
            recipe=partial)
    E_L = math.sqrt(n_cav * (p.kappa**2 / 4.0 + p.omega_m**2))
    return LabRecipe(E_L=E_L, **partial)


def recipe_system(recipe: LabRecipe, fixed: SystemParams) -> SystemParams:
    """System parameters that implement ``recipe`` (for feeding back into ``derive``)."""
    return replace(fixed, E_L=recipe.E_L, omega_L=recipe.omega_L, omega_c=recipe.omega_c,
                   omega_sw=recipe.omega_sw)
