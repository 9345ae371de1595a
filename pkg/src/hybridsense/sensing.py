"""Force-referred noise, sensitivity and signal-to-noise ratio.

Spectral densities are two-sided and symmetrized, matching the output
spectrum normalization; sensitivities are in N/sqrt(Hz) on that basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import HBAR, DerivedParams, ModulationSettings, ThermalEnvironment
from .response import transfer_functions
from .spectra import added_noise

NORMALIZATION = "two-sided symmetrized"


@dataclass(frozen=True)
class Tone:
    """Monochromatic force ``F(t) = amplitude * cos(frequency t + phase)``.

    Only the quadrature ``F(t) sin(omega_m t)`` reaches the measured
    mechanical quadrature, so a resonant tone contributes to the on-resonance
    signal through ``sin(phase)``. The default phase puts all of it there.
    """

    amplitude: float
    frequency: float
    phase: float = -math.pi / 2

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("tone amplitude must be >= 0")

    def lines(self):
        """Fourier-line weights ``{omega_k: c_k}`` with ``F(t) = sum c_k exp(-i omega_k t)``."""
        half = self.amplitude / 2.0
        if self.frequency == 0:
            return {0.0: self.amplitude * math.cos(self.phase) + 0j}
        return {
            self.frequency: half * complex(math.cos(self.phase), -math.sin(self.phase)),
            -self.frequency: half * complex(math.cos(self.phase), math.sin(self.phase)),
        }


@dataclass(frozen=True)
class TabulatedForce:
    """Force spectrum ``F(omega)`` on an increasing grid; linear interpolation between nodes."""

    omega: np.ndarray
    values: np.ndarray
    hermitian_rtol: float = 1e-9

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if w.ndim != 1 or w.shape != v.shape:
            raise ValueError("omega and values must be 1-D arrays of equal length")
        if np.any(np.diff(w) <= 0):
            raise ValueError("omega grid must be strictly increasing")
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "values", v)
        if np.allclose(w, -w[::-1]):
            scale = max(np.abs(v).max(), np.finfo(float).tiny)
            if np.abs(v[::-1] - np.conj(v)).max() > self.hermitian_rtol * scale:
                raise ValueError("tabulated force is not Hermitian: F(-w) != conj(F(w))")

    def __call__(self, omega):
        w = np.asarray(omega, dtype=float)
        if np.any(w < self.omega[0]) or np.any(w > self.omega[-1]):
            raise ValueError(f"force spectrum not tabulated at omega={omega!r}")
        return (np.interp(w, self.omega, self.values.real)
                + 1j * np.interp(w, self.omega, self.values.imag))


@dataclass(frozen=True)
class SensingPoint:
    omega: float
    S_N: float
    sensitivity: float
    snr: float


def force_transform(signal, omega, omega_m, line_tol=1e-9):
    """``F~(omega) = (F(omega + omega_m) - F(omega - omega_m)) / 2``.

    For a :class:`Tone` the value is the weight of the spectral line at
    ``omega`` (zero off the lines); ``line_tol`` is relative to ``omega_m``.
    """
    if signal is None:
        return 0j
    if isinstance(signal, TabulatedForce):
        try:
            return complex(0.5 * (signal(omega + omega_m) - signal(omega - omega_m)))
        except ValueError as exc:
            raise ValueError(f"{exc} (needed for omega +/- omega_m)") from None
    tol = line_tol * abs(omega_m)
    lines = signal.lines()

    def at(w):
        return sum((c for wk, c in lines.items() if abs(wk - w) <= tol), 0j)

    return 0.5 * (at(omega + omega_m) - at(omega - omega_m))


def transduction_constant(derived: DerivedParams):
    """``m hbar omega_m gamma_m`` in N^2/Hz."""
    if derived.mass is None or derived.omega_m is None:
        raise ValueError("mass and omega_m are needed for force-referred quantities")
    return derived.mass * HBAR * derived.omega_m * derived.gamma_m


def force_noise_from_added(derived, env: ThermalEnvironment, n_add):
    return transduction_constant(derived) * ((env.n_m + 0.5) + np.asarray(n_add))


def noise_force_spectrum(derived: DerivedParams, mods: ModulationSettings,
                         env: ThermalEnvironment, omega):
    n_add = added_noise(transfer_functions(derived, mods, omega), env)
    return force_noise_from_added(derived, env, n_add)


def sensitivity(derived, mods, env, omega):
    """Minimum detectable force ``sqrt(S_N)`` in N/sqrt(Hz)."""
    return np.sqrt(noise_force_spectrum(derived, mods, env, omega))


def snr(signal, derived, mods, env, omega):
    ft = force_transform(signal, omega, derived.omega_m)
    return abs(ft) / sensitivity(derived, mods, env, omega)


def sensing_point(signal, derived, mods, env, omega) -> SensingPoint:
    S_N = float(noise_force_spectrum(derived, mods, env, omega))
    sens = math.sqrt(S_N)
    return SensingPoint(omega=omega, S_N=S_N, sensitivity=sens,
                        snr=abs(force_transform(signal, omega, derived.omega_m)) / sens)
