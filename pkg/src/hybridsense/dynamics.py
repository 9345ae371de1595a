"""Drift matrix of the linearized quadrature equations and stability analysis.

Quadrature ordering throughout is ``(X_a, P_a, X_b, P_b, X_d, P_d)``. The
matrix splits into two uncoupled 3x3 blocks, ``(X_a, P_b, P_d)`` and
``(P_a, X_b, X_d)``; only the second one carries the amplified mechanical
and Bogoliubov quadratures and can go unstable.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericError, SingularityError
from .params import DerivedParams, ModulationSettings

log = logging.getLogger(__name__)

X_A, P_A, X_B, P_B, X_D, P_D = range(6)
AMPLIFIED_BLOCK = (P_A, X_B, X_D)
DAMPED_BLOCK = (X_A, P_B, P_D)

MARGINAL_EPS = 1e-9


@dataclass(frozen=True)
class DriftMatrix:
    """The 6x6 real drift matrix together with the rates that built it."""

    a: np.ndarray
    kappa: float
    gamma_m: float
    gamma_d: float
    g: float
    G: float
    lambda_m: float
    lambda_d: float

    @property
    def C0(self):
        return 4.0 * self.g**2 / (self.kappa * self.gamma_m)

    @property
    def C1(self):
        return 4.0 * self.G**2 / (self.kappa * self.gamma_d)

    @property
    def xi_m(self):
        return 2.0 * self.lambda_m / self.gamma_m

    @property
    def xi_d(self):
        return 2.0 * self.lambda_d / self.gamma_d

    def block(self, indices):
        idx = np.asarray(indices)
        return self.a[np.ix_(idx, idx)]


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    max_real_eigenvalue: float
    eigenvalues: np.ndarray
    marginal: bool
    lambda_m: float
    lambda_d: float
    lambda_m_max: float
    lambda_d_max: float
    collective_C_m: float
    collective_C_d: float

    @property
    def within_analytic_bounds(self):
        return self.lambda_m <= self.lambda_m_max and self.lambda_d <= self.lambda_d_max


def build_drift_matrix(derived: DerivedParams, mods: ModulationSettings) -> DriftMatrix:
    kappa, gm, gd = derived.kappa, derived.gamma_m, derived.gamma_d
    g, G = derived.g, derived.G
    lm, ld = mods.lambdas(gm, gd)

    a = np.zeros((6, 6))
    a[X_A, X_A] = -kappa / 2.0
    a[X_A, P_B] = -g
    a[X_A, P_D] = G
    a[P_A, P_A] = -kappa / 2.0
    a[P_A, X_B] = g
    a[P_A, X_D] = -G
    a[X_B, P_A] = -g
    a[X_B, X_B] = lm - gm / 2.0
    a[P_B, X_A] = g
    a[P_B, P_B] = -(lm + gm / 2.0)
    a[X_D, P_A] = G
    a[X_D, X_D] = ld - gd / 2.0
    a[P_D, X_A] = -G
    a[P_D, P_D] = -(ld + gd / 2.0)
    a.setflags(write=False)
    return DriftMatrix(a=a, kappa=kappa, gamma_m=gm, gamma_d=gd, g=g, G=G,
                       lambda_m=lm, lambda_d=ld)


def collective_cooperativity(C0, C1, xi_m, xi_d):
    """Collective cooperativities ``(C_m, C_d)`` entering the modulation bounds.

    ``C_m`` dresses ``C0`` by the driven Bogoliubov channel and ``C_d``
    dresses ``C1`` by the driven mechanical channel.
    """

    def dressed(C_own, C_other, xi_other):
        s = 1.0 + C_other - xi_other**2
        den = s * s - xi_other**2 * C_other**2
        if den == 0:
            raise SingularityError(
                f"collective cooperativity diverges at xi={xi_other!r}", value=xi_other)
        return C_own * s / den

    return dressed(C0, C1, xi_d), dressed(C1, C0, xi_m)


def modulation_bound(gamma, collective_C):
    """Largest modulation rate ``lambda_max = (gamma/2)(1 + C)``."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    return 0.5 * gamma * (1.0 + collective_C)


def exact_threshold_xi_m(C0, C1, xi_d):
    """Mechanical modulation depth where the amplified block's determinant vanishes.

    Setting ``det(P_a, X_b, X_d block) = 0`` gives
    ``(1-xi_m)(1-xi_d) + C0 (1-xi_d) + C1 (1-xi_m) = 0``. When the instability
    sets in through a real eigenvalue this is the exact boundary; it reduces
    to ``1 + C_m`` from :func:`collective_cooperativity` only at ``xi_d = 0``.
    """
    den = 1.0 + C1 - xi_d
    if den == 0:
        raise SingularityError("threshold undefined at xi_d = 1 + C1", value=xi_d)
    return 1.0 + C0 * (1.0 - xi_d) / den


def _eigvals(a):
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigenvalue solver failed: {exc}") from exc


def spectrum(A: DriftMatrix):
    """Eigenvalues of A, assembled from the two decoupled blocks."""
    ev = np.concatenate([_eigvals(A.block(AMPLIFIED_BLOCK)), _eigvals(A.block(DAMPED_BLOCK))])
    if not np.all(np.isfinite(ev)):
        raise NumericError("non-finite eigenvalues")
    return ev


def stability_eigen(A: DriftMatrix) -> StabilityReport:
    """Decide stability from the eigenvalues of A and attach the analytic bounds."""
    if not np.all(np.isfinite(A.a)):
        raise NumericError("drift matrix has non-finite entries")
    ev = spectrum(A)
    max_re = float(ev.real.max())

    try:
        C_m, C_d = collective_cooperativity(A.C0, A.C1, A.xi_m, A.xi_d)
        lm_max = modulation_bound(A.gamma_m, C_m)
        ld_max = modulation_bound(A.gamma_d, C_d)
    except SingularityError:
        C_m = C_d = lm_max = ld_max = math.nan

    marginal = -MARGINAL_EPS * A.gamma_m <= max_re <= 0.0
    if marginal:
        log.warning("operating point is marginally stable (max Re = %.3e rad/s)", max_re)
    return StabilityReport(
        stable=max_re < 0.0, max_real_eigenvalue=max_re, eigenvalues=ev, marginal=marginal,
        lambda_m=A.lambda_m, lambda_d=A.lambda_d,
        lambda_m_max=lm_max, lambda_d_max=ld_max,
        collective_C_m=C_m, collective_C_d=C_d,
    )


def max_real_part(derived, mods):
    return float(spectrum(build_drift_matrix(derived, mods)).real.max())


def eigen_threshold_xi_m(derived: DerivedParams, xi_d, xi_max=4.0, steps=400, xtol=1e-13):
    """Bisect the first xi_m (scanning up from 0) where max Re(eig A) reaches zero.

    Independent of any closed form; used to audit the analytic bounds.
    Returns ``None`` if the system is already unstable at ``xi_m = 0`` or no
    crossing occurs below ``xi_max``.
    """

    def f(x):
        return max_real_part(derived, ModulationSettings(xi_m=x, xi_d=xi_d))

    grid = np.linspace(0.0, xi_max, steps + 1)
    if f(grid[0]) >= 0:
        return None
    lo = grid[0]
    for hi in grid[1:]:
        if f(hi) >= 0:
            break
        lo = hi
    else:
        return None
    while hi - lo > xtol * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
