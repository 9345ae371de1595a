"""Frequency-domain susceptibility and output phase-quadrature transfer functions.

Fourier convention: ``d/dt -> -i omega``, so ``chi(omega) = (-i omega I - A)^-1``
and the bare cavity has ``1/chi_0 = kappa/2 - i omega``.

Functions accept scalar or array ``omega``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import AMPLIFIED_BLOCK, DriftMatrix
from .errors import SingularityError
from .params import DerivedParams, ModulationSettings

POLE_TOL = 1e-30


@dataclass(frozen=True)
class Susceptibility:
    omega: float
    chi: np.ndarray


@dataclass(frozen=True)
class TransferFunctions:
    """Coefficients of the output phase quadrature on the three input noises."""

    omega: np.ndarray | float
    A_coef: np.ndarray | complex
    B_coef: np.ndarray | complex
    D_coef: np.ndarray | complex


def _solve(m, omega):
    try:
        return np.linalg.inv(m)
    except np.linalg.LinAlgError as exc:
        raise SingularityError(f"(-i omega I - A) is singular at omega={omega!r}",
                               omega=omega) from exc


def susceptibility_full(A: DriftMatrix, omega) -> Susceptibility:
    """Invert the full 6x6 system at a single frequency."""
    m = -1j * omega * np.eye(6) - A.a
    return Susceptibility(omega=omega, chi=_solve(m, omega))


def susceptibility_block(A: DriftMatrix, omega):
    """``(chi22, chi23, chi25)`` by inverting only the ``(P_a, X_b, X_d)`` block."""
    m = -1j * omega * np.eye(3) - A.block(AMPLIFIED_BLOCK)
    inv = _solve(m, omega)
    return inv[0, 0], inv[0, 1], inv[0, 2]


def _inverse_factors(derived, mods, omega):
    lm, ld = mods.lambdas(derived.gamma_m, derived.gamma_d)
    w = np.asarray(omega, dtype=float)
    inv_c = derived.kappa / 2.0 - 1j * w
    inv_m = derived.gamma_m / 2.0 - lm - 1j * w
    inv_d = derived.gamma_d / 2.0 - ld - 1j * w
    return w, inv_c, inv_m, inv_d


def _chi_terms(derived: DerivedParams, mods: ModulationSettings, omega):
    """Closed-form elements plus a mask of frequencies sitting on a pole.

    The three elements share ``det = a m d + g^2 d + G^2 m`` of the amplified
    block; each is written over it so that a vanishing bare mode
    susceptibility (e.g. ``xi = 1`` at ``omega = 0``) is not mistaken for a
    pole of the coupled system.
    """
    g, G = derived.g, derived.G
    w, a, m, d = _inverse_factors(derived, mods, omega)
    det = a * m * d + g * g * d + G * G * m
    bad = np.abs(det) < POLE_TOL
    safe = np.where(bad, 1.0, det)
    chi22 = m * d / safe
    chi23 = g * d / safe
    chi25 = -G * m / safe
    return w, chi22, chi23, chi25, bad


def chi_closed_form(derived: DerivedParams, mods: ModulationSettings, omega):
    """Closed forms of ``chi22, chi23, chi25``.

    Algebraically identical to::

        chi22 = [1/chi_0 + g^2 chi_m + G^2 chi_d]^-1
        chi23 = g  [1/(chi_0 chi_m) + g^2 + G^2 chi_d / chi_m]^-1
        chi25 = -G [1/(chi_0 chi_d) + G^2 + g^2 chi_m / chi_d]^-1

    with ``1/chi_m = gamma_m/2 - lambda_m - i omega`` (likewise for d).
    """
    w, chi22, chi23, chi25, bad = _chi_terms(derived, mods, omega)
    if np.any(bad):
        at = w[bad].ravel()[0] if w.ndim else float(w)
        raise SingularityError(f"susceptibility pole at omega={at!r} rad/s", omega=at)
    if w.ndim == 0:
        return complex(chi22), complex(chi23), complex(chi25)
    return chi22, chi23, chi25


def coefficients(derived: DerivedParams, chi22, chi23, chi25):
    A_coef = 1.0 - derived.kappa * chi22
    B_coef = np.sqrt(derived.kappa * derived.gamma_m) * chi23
    D_coef = np.sqrt(derived.kappa * derived.gamma_d) * chi25
    return A_coef, B_coef, D_coef


def transfer_functions(derived: DerivedParams, mods: ModulationSettings, omega) -> TransferFunctions:
    chi22, chi23, chi25 = chi_closed_form(derived, mods, omega)
    A_coef, B_coef, D_coef = coefficients(derived, chi22, chi23, chi25)
    return TransferFunctions(omega=omega, A_coef=A_coef, B_coef=B_coef, D_coef=D_coef)
