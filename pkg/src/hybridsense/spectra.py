"""Output phase-quadrature spectrum, mechanical response and added noise."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import StabilityReport, build_drift_matrix, stability_eigen
from .errors import SingularityError
from .params import DerivedParams, ModulationSettings, ThermalEnvironment
from .response import TransferFunctions, _chi_terms, coefficients

log = logging.getLogger(__name__)

N_ADD_SQL = 0.5

DEFAULT_SPAN = 2.0  # in units of gamma_m
DEFAULT_POINTS = 4001


@dataclass(frozen=True)
class SpectrumPoint:
    omega: float
    S_out: float
    R_m: float
    n_add: float  # nan where the transducer is dead (B = 0)
    gain_amplitude: float | None = None
    error: str | None = None


def output_spectrum(tf: TransferFunctions, env: ThermalEnvironment):
    return ((env.n_c + 0.5) * np.abs(tf.A_coef) ** 2
            + (env.n_m + 0.5) * np.abs(tf.B_coef) ** 2
            + (env.n_d + 0.5) * np.abs(tf.D_coef) ** 2)


def mechanical_response(tf: TransferFunctions):
    return np.abs(tf.B_coef) ** 2


def added_noise(tf: TransferFunctions, env: ThermalEnvironment):
    """Optical and atomic input noise referred to the mechanical input."""
    R = np.abs(tf.B_coef) ** 2
    if np.any(R == 0):
        raise SingularityError("mechanical transduction vanishes (B = 0); added noise undefined",
                               omega=tf.omega)
    return ((env.n_c + 0.5) * np.abs(tf.A_coef) ** 2
            + (env.n_d + 0.5) * np.abs(tf.D_coef) ** 2) / R


def optical_gain_amplitude(C0, C1, xi_m, xi_d):
    """Signed amplitude ``sqrt(G_a)``; equals ``A(0)`` of the output quadrature."""
    if C1 == 0:
        atomic = 0.0
    else:
        if xi_d == 1:
            raise SingularityError("optical gain undefined at xi_d = 1", value=xi_d)
        atomic = C1 * (1.0 - xi_m) / (1.0 - xi_d)
    den = C0 + (1.0 - xi_m) + atomic
    if den == 0:
        raise SingularityError("optical gain denominator vanishes", value=xi_m)
    return (C0 - (1.0 - xi_m) + atomic) / den


def on_resonance_formulas(C0, C1, xi_m, xi_d, env: ThermalEnvironment):
    """``(n_add(0), R_m(0), sqrt(G_a))`` from the zero-frequency closed forms."""
    if xi_m == 1:
        raise SingularityError("on-resonance formulas singular at xi_m = 1", value=xi_m)
    if C0 == 0:
        raise SingularityError("C0 = 0: mirror decoupled, added noise undefined", value=C0)
    amp = optical_gain_amplitude(C0, C1, xi_m, xi_d)
    G_a = amp * amp
    if amp == 1:
        raise SingularityError("sqrt(G_a) = 1: no mechanical transduction", value=amp)
    R_m0 = C0 * ((amp - 1.0) / (1.0 - xi_m)) ** 2
    atomic = 0.0 if C1 == 0 else C1 / (1.0 - xi_d) ** 2 * (env.n_d + 0.5)
    n_add0 = (1.0 - xi_m) ** 2 / C0 * (G_a / (amp - 1.0) ** 2 * (env.n_c + 0.5) + atomic)
    return n_add0, R_m0, amp


def off_modulation_formulas(C0, C1, env: ThermalEnvironment):
    """``(n_add(0), R_m(0))`` with both modulations switched off."""
    if not C0 > 0:
        raise ValueError("C0 must be positive")
    n_add0 = ((C0 + C1 - 1.0) ** 2 / 4.0 * (env.n_c + 0.5) + C1 * (env.n_d + 0.5)) / C0
    R_m0 = 4.0 * C0 / (1.0 + C0 + C1) ** 2
    return n_add0, R_m0


def default_grid(gamma_m, span=DEFAULT_SPAN, points=DEFAULT_POINTS):
    return np.linspace(-span * gamma_m, span * gamma_m, points)


def measure_where(omega, values, threshold, above=True):
    """Total measure of ``{omega : values > threshold}`` (or ``<`` when ``above=False``).

    Threshold crossings are placed by linear interpolation between grid
    points; segments touching a nan are dropped.
    """
    w = np.asarray(omega, dtype=float)
    v = np.asarray(values, dtype=float) - threshold
    if not above:
        v = -v
    total = 0.0
    for i in range(len(w) - 1):
        v0, v1 = v[i], v[i + 1]
        if not (np.isfinite(v0) and np.isfinite(v1)):
            continue
        dw = w[i + 1] - w[i]
        if v0 > 0 and v1 > 0:
            total += dw
        elif v0 > 0 or v1 > 0:
            total += dw * max(v0, v1) / abs(v1 - v0)
    return total


def window_around(omega, values, threshold, center=0.0, above=True):
    """Contiguous interval containing ``center`` where the condition holds.

    Returns ``(lo, hi)`` with interpolated edges, or ``None`` when the
    condition fails at the grid point nearest ``center``. Edges are clipped
    to the grid.
    """
    w = np.asarray(omega, dtype=float)
    v = np.asarray(values, dtype=float) - threshold
    if not above:
        v = -v
    ok = np.isfinite(v) & (v > 0)
    i0 = int(np.argmin(np.abs(w - center)))
    if not ok[i0]:
        return None

    def edge(i, step):
        while 0 <= i + step < len(w) and ok[i + step]:
            i += step
        j = i + step
        if not (0 <= j < len(w)) or not np.isfinite(v[j]):
            return w[i]
        return w[i] + (w[j] - w[i]) * v[i] / (v[i] - v[j])

    return edge(i0, -1), edge(i0, +1)


@dataclass
class SweepResult:
    omega: np.ndarray
    points: list[SpectrumPoint]
    stability: StabilityReport
    amplification_bandwidth: float
    sub_sql_bandwidth: float
    errors: dict[int, str] = field(default_factory=dict)

    @property
    def R_m(self):
        return np.array([p.R_m for p in self.points])

    @property
    def n_add(self):
        return np.array([p.n_add for p in self.points])

    @property
    def S_out(self):
        return np.array([p.S_out for p in self.points])


def sweep(derived: DerivedParams, mods: ModulationSettings, env: ThermalEnvironment, grid=None):
    """Evaluate the spectrum decomposition on a frequency grid.

    Poles and dead transduction points are recorded per index in
    ``SweepResult.errors``; the remaining points are still evaluated.
    """
    w = default_grid(derived.gamma_m) if grid is None else np.asarray(grid, dtype=float)
    report = stability_eigen(build_drift_matrix(derived, mods))
    if not report.stable:
        log.warning("sweeping an unstable operating point (max Re eig = %.4g rad/s)",
                    report.max_real_eigenvalue)

    _, chi22, chi23, chi25, pole = _chi_terms(derived, mods, w)
    A_coef, B_coef, D_coef = coefficients(derived, chi22, chi23, chi25)
    tf = TransferFunctions(omega=w, A_coef=A_coef, B_coef=B_coef, D_coef=D_coef)
    S = output_spectrum(tf, env)
    R = mechanical_response(tf)
    dead = (R == 0) & ~pole
    with np.errstate(divide="ignore", invalid="ignore"):
        n_add = np.where(dead | pole, np.nan,
                         ((env.n_c + 0.5) * np.abs(A_coef) ** 2
                          + (env.n_d + 0.5) * np.abs(D_coef) ** 2) / np.where(dead, 1.0, R))
    S = np.where(pole, np.nan, S)
    R = np.where(pole, np.nan, R)

    errors = {}
    for i in np.flatnonzero(pole):
        errors[int(i)] = f"susceptibility pole at omega={w[i]!r} rad/s"
    for i in np.flatnonzero(dead):
        errors[int(i)] = "mechanical transduction vanishes (B = 0)"

    gain_at_zero = None
    zero_idx = np.flatnonzero(w == 0.0)
    if zero_idx.size and not pole[zero_idx[0]]:
        gain_at_zero = float(A_coef[zero_idx[0]].real)

    points = [
        SpectrumPoint(omega=float(w[i]), S_out=float(S[i]), R_m=float(R[i]),
                      n_add=float(n_add[i]),
                      gain_amplitude=gain_at_zero if w[i] == 0.0 else None,
                      error=errors.get(i))
        for i in range(len(w))
    ]
    return SweepResult(
        omega=w, points=points, stability=report,
        amplification_bandwidth=measure_where(w, R, 1.0, above=True),
        sub_sql_bandwidth=measure_where(w, n_add, N_ADD_SQL, above=False),
        errors=errors,
    )
