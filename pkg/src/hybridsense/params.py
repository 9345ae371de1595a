"""Physical parameters of the hybrid cavity and the quantities derived from them.

All frequencies and rates are angular (rad/s). Conversion from cycle
frequencies happens once, at configuration load time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import constants

from .errors import ConvergenceError, SingularityError

HBAR = constants.hbar
K_B = constants.k

FIXED_POINT_RTOL = 1e-12
FIXED_POINT_MAXITER = 1000


@dataclass(frozen=True)
class SystemParams:
    """Raw constants and rates of cavity, mirror, condensate and drive.

    ``E_L`` and ``omega_L`` may be left unset when the parameters are only
    used as the fixed part of a design problem. ``omega_sw`` overrides the
    s-wave frequency; otherwise it is computed from ``scattering_length``
    when given, and falls back to the red-detuned trap setting
    ``omega_m - 4 omega_R``.
    """

    kappa: float
    omega_m: float
    gamma_m: float
    mass: float
    cavity_length: float
    omega_c: float
    n_atoms: float
    atom_mass: float
    g_a: float
    omega_a: float
    omega_R: float
    gamma_d: float
    beam_waist: float
    E_L: float | None = None
    omega_L: float | None = None
    omega_sw: float | None = None
    scattering_length: float | None = None

    def __post_init__(self):
        positive = ("kappa", "omega_m", "gamma_m", "mass", "cavity_length", "omega_c",
                    "atom_mass", "g_a", "omega_a", "omega_R", "gamma_d", "beam_waist")
        for name in positive:
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if not self.n_atoms >= 1:
            raise ValueError(f"n_atoms must be >= 1, got {self.n_atoms!r}")
        if self.E_L is not None and self.E_L < 0:
            raise ValueError("E_L must be non-negative")
        if self.omega_L is not None and self.omega_L <= 0:
            raise ValueError("omega_L must be positive")


@dataclass(frozen=True)
class ModulationSettings:
    """Dimensionless modulation depths ``xi = 2 lambda / gamma``.

    Phases are fixed so that both lambdas are real.
    """

    xi_m: float = 0.0
    xi_d: float = 0.0

    @classmethod
    def from_lambdas(cls, lambda_m, lambda_d, gamma_m, gamma_d):
        return cls(xi_m=2.0 * lambda_m / gamma_m, xi_d=2.0 * lambda_d / gamma_d)

    def lambdas(self, gamma_m, gamma_d):
        """Return ``(lambda_m, lambda_d)`` in rad/s."""
        return self.xi_m * gamma_m / 2.0, self.xi_d * gamma_d / 2.0


@dataclass(frozen=True)
class ThermalEnvironment:
    """Mean thermal occupations of the cavity, mechanical and Bogoliubov baths."""

    n_c: float = 0.0
    n_m: float = 0.0
    n_d: float = 0.0
    temperature: float | None = None

    def __post_init__(self):
        for name in ("n_c", "n_m", "n_d"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @classmethod
    def from_temperature(cls, temperature, omega_c, omega_m, omega_d):
        return cls(
            n_c=thermal_occupation(omega_c, temperature),
            n_m=thermal_occupation(omega_m, temperature),
            n_d=thermal_occupation(omega_d, temperature),
            temperature=temperature,
        )


@dataclass(frozen=True)
class DerivedParams:
    """Couplings and rates consumed by the dynamics and response code.

    Only ``kappa``, ``gamma_m``, ``gamma_d``, ``g``, ``G``, ``C0`` and ``C1``
    are needed for the linear response. The remaining fields trace the
    laboratory chain and are ``None`` for points built directly from
    cooperativities.
    """

    kappa: float
    gamma_m: float
    gamma_d: float
    g: float
    G: float
    C0: float
    C1: float
    omega_m: float | None = None
    mass: float | None = None
    x_zp: float | None = None
    g0: float | None = None
    G0: float | None = None
    U0: float | None = None
    delta_a: float | None = None
    omega_sw: float | None = None
    omega_d_eff: float | None = None
    Delta0: float | None = None
    Delta0_bar: float | None = None
    a_bar: float | None = None
    b_bar: float | None = None
    d_bar: float | None = None
    iterations: int = field(default=0, compare=False)

    @classmethod
    def from_cooperativities(cls, C0, C1, kappa, gamma_m, gamma_d, omega_m=None, mass=None):
        """Back out ``g`` and ``G`` from target cooperativities."""
        if C0 < 0 or C1 < 0:
            raise ValueError("cooperativities must be non-negative")
        g = math.sqrt(C0 * kappa * gamma_m / 4.0)
        G = math.sqrt(C1 * kappa * gamma_d / 4.0)
        return cls(kappa=kappa, gamma_m=gamma_m, gamma_d=gamma_d, g=g, G=G,
                   C0=C0, C1=C1, omega_m=omega_m, mass=mass)

    def with_couplings(self, g, G):
        """Copy with new enhanced couplings; cooperativities follow."""
        return replace(
            self, g=g, G=G,
            C0=4.0 * g**2 / (self.kappa * self.gamma_m),
            C1=4.0 * G**2 / (self.kappa * self.gamma_d),
        )


def thermal_occupation(omega, temperature):
    """Bose-Einstein occupation ``1/(exp(hbar omega / k_B T) - 1)``."""
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega!r}")
    if temperature < 0:
        raise ValueError(f"temperature must be >= 0, got {temperature!r}")
    if temperature == 0:
        return 0.0
    x = HBAR * omega / (K_B * temperature)
    with np.errstate(over="ignore"):
        return float(1.0 / np.expm1(x))


def zero_point_fluctuation(mass, omega_m):
    return math.sqrt(HBAR / (2.0 * mass * omega_m))


def optomechanical_coupling(params: SystemParams):
    """Return ``(x_zp, g0)``."""
    x_zp = zero_point_fluctuation(params.mass, params.omega_m)
    return x_zp, x_zp * params.omega_c / params.cavity_length


def single_photon_couplings(params: SystemParams, delta_a):
    """Return ``(x_zp, g0, U0, G0)`` for a given atom-laser detuning."""
    if delta_a == 0:
        raise SingularityError("atom-laser detuning is zero; lattice depth U0 diverges",
                               value=delta_a)
    x_zp, g0 = optomechanical_coupling(params)
    U0 = -params.g_a**2 / delta_a
    G0 = math.sqrt(2.0 * params.n_atoms) * U0 / 4.0
    return x_zp, g0, U0, G0


def s_wave_frequency(params: SystemParams):
    if params.omega_sw is not None:
        return params.omega_sw
    if params.scattering_length is not None:
        return (8.0 * math.pi * HBAR * params.n_atoms * params.scattering_length
                / (params.atom_mass * params.cavity_length * params.beam_waist**2))
    return params.omega_m - 4.0 * params.omega_R


def derive(params: SystemParams, rtol=FIXED_POINT_RTOL, maxiter=FIXED_POINT_MAXITER):
    """Compute couplings, mean fields and cooperativities.

    The optical amplitude is solved self-consistently with the
    radiation-pressure shift of the detuning::

        a = E_L / sqrt(kappa^2/4 + Db^2),   Db = D0 - 2 g0 b + 2 G0 d,
        b = g0 a^2 / omega_m,               d = -G0 a^2 / omega_d

    starting from ``Db = D0``.
    """
    if params.E_L is None or params.omega_L is None:
        raise ValueError("derive needs both E_L and omega_L")

    delta_a = params.omega_a - params.omega_L
    x_zp, g0, U0, G0 = single_photon_couplings(params, delta_a)
    omega_sw = s_wave_frequency(params)
    omega_d = 4.0 * params.omega_R + omega_sw
    Delta0 = (params.omega_c - params.omega_L) + params.n_atoms * U0 / 2.0

    def shifted(a):
        b = g0 * a * a / params.omega_m
        d = -G0 * a * a / omega_d
        return Delta0 - 2.0 * g0 * b + 2.0 * G0 * d, b, d

    half_kappa_sq = params.kappa**2 / 4.0
    a_bar = params.E_L / math.sqrt(half_kappa_sq + Delta0**2)
    iterations = 0
    if params.E_L > 0:
        for iterations in range(1, maxiter + 1):
            Delta0_bar, _, _ = shifted(a_bar)
            a_next = params.E_L / math.sqrt(half_kappa_sq + Delta0_bar**2)
            converged = abs(a_next - a_bar) <= rtol * abs(a_next)
            a_bar = a_next
            if converged:
                break
        else:
            raise ConvergenceError(
                f"mean-field amplitude did not converge in {maxiter} iterations "
                f"(last a_bar={a_bar:.6g}); the drive may be in a bistable region")
    Delta0_bar, b_bar, d_bar = shifted(a_bar)

    g = g0 * a_bar
    G = G0 * a_bar
    return DerivedParams(
        kappa=params.kappa, gamma_m=params.gamma_m, gamma_d=params.gamma_d,
        g=g, G=G,
        C0=4.0 * g**2 / (params.kappa * params.gamma_m),
        C1=4.0 * G**2 / (params.kappa * params.gamma_d),
        omega_m=params.omega_m, mass=params.mass,
        x_zp=x_zp, g0=g0, G0=G0, U0=U0, delta_a=delta_a,
        omega_sw=omega_sw, omega_d_eff=omega_d,
        Delta0=Delta0, Delta0_bar=Delta0_bar,
        a_bar=a_bar, b_bar=b_bar, d_bar=d_bar,
        iterations=iterations,
    )
