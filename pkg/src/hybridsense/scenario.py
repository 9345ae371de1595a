"""Turn an expanded :class:`~hybridsense.config.Config` into model objects and run it."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import config as cfgmod
from .design import matching_residual, solve_xi_d
from .dynamics import StabilityReport, build_drift_matrix, exact_threshold_xi_m, stability_eigen
from .errors import ConfigError, HybridSenseError, SingularityError
from .params import DerivedParams, ModulationSettings, SystemParams, ThermalEnvironment, derive
from .sensing import NORMALIZATION, Tone, force_noise_from_added, force_transform
from .spectra import (DEFAULT_POINTS, DEFAULT_SPAN, N_ADD_SQL, SweepResult,
                      on_resonance_formulas, sweep, window_around)

CSV_HEADER = ("omega_over_gamma_m", "R_m", "n_add", "S_out", "sensitivity_N_per_sqrtHz", "snr")

_COOP_KEYS = {"C0", "C1", "kappa_over_gamma_m", "gamma_m_over_gamma_d", "mass"}
_LAB_REQUIRED = ("kappa", "omega_m", "gamma_m", "omega_c", "g_a", "omega_a", "omega_R",
                 "gamma_d", "E_L", "omega_L")
_LAB_SCALARS = ("mass", "cavity_length", "n_atoms", "atom_mass", "beam_waist")


@dataclass
class Scenario:
    config: cfgmod.Config
    derived: DerivedParams
    mods: ModulationSettings
    quoted: ModulationSettings
    env: ThermalEnvironment
    grid: np.ndarray
    signal: Tone | None = None
    system: SystemParams | None = None

    @property
    def name(self):
        return self.config.get("scenario", "expanded_from", "custom")


def _exactly_one(cfg, section, groups):
    present = [name for name, keys in groups.items()
               if any(cfg.has(section, k) for k in keys)]
    if len(present) != 1:
        raise ConfigError(
            f"[{section}] needs exactly one of: {' | '.join(groups)} (found {present or 'none'})")
    return present[0]


def lab_system(cfg, require_drive=True):
    s = "system"
    kw = {name: cfg.frequency(s, name, required=require_drive or name not in ("E_L", "omega_L"))
          for name in _LAB_REQUIRED}
    kw.update({name: cfg.float(s, name) for name in _LAB_SCALARS})
    kw["omega_sw"] = cfg.frequency(s, "omega_sw", required=False)
    if cfg.has(s, "scattering_length"):
        kw["scattering_length"] = cfg.float(s, "scattering_length")
    try:
        return SystemParams(**kw)
    except ValueError as exc:
        raise ConfigError(f"[system] {exc}") from None


def _derived(cfg):
    s = "system"
    form = _exactly_one(cfg, s, {
        "cooperativity form (C0, C1, kappa_over_gamma_m, ...)": ("C0", "C1", "kappa_over_gamma_m"),
        "laboratory form (E_L, omega_L, cavity_length, ...)": (
            "E_L_hz", "E_L_rads", "omega_L_hz", "omega_L_rads", "cavity_length"),
    })
    if form.startswith("cooperativity"):
        gamma_m = cfg.frequency(s, "gamma_m")
        kappa = cfg.float(s, "kappa_over_gamma_m") * gamma_m
        gamma_d = gamma_m / cfg.float(s, "gamma_m_over_gamma_d", 1.0)
        try:
            derived = DerivedParams.from_cooperativities(
                C0=cfg.float(s, "C0"), C1=cfg.float(s, "C1"), kappa=kappa, gamma_m=gamma_m,
                gamma_d=gamma_d, omega_m=cfg.frequency(s, "omega_m"), mass=cfg.float(s, "mass"))
        except ValueError as exc:
            raise ConfigError(f"[system] {exc}") from None
        return derived, None
    system = lab_system(cfg)
    return derive(system), system


def _modulation(cfg, derived):
    s = "modulation"
    form = _exactly_one(cfg, s, {
        "xi_m/xi_d": ("xi_m", "xi_d"),
        "lambda_m/lambda_d": ("lambda_m_hz", "lambda_m_rads", "lambda_d_hz", "lambda_d_rads"),
    })
    if form == "xi_m/xi_d":
        quoted = ModulationSettings(xi_m=cfg.float(s, "xi_m", 0.0), xi_d=cfg.float(s, "xi_d", 0.0))
    else:
        lm = cfg.frequency(s, "lambda_m", required=False) or 0.0
        ld = cfg.frequency(s, "lambda_d", required=False) or 0.0
        quoted = ModulationSettings.from_lambdas(lm, ld, derived.gamma_m, derived.gamma_d)

    mode = cfg.get(s, "mode", "as-given")
    if mode == "as-given":
        return quoted, quoted
    if mode != "solve-matching":
        raise cfg.error(s, "mode", f"expected 'as-given' or 'solve-matching', got {mode!r}")
    xi_d = solve_xi_d(derived.C0, derived.C1, quoted.xi_m)
    if xi_d is None:
        return quoted, quoted
    return ModulationSettings(xi_m=quoted.xi_m, xi_d=xi_d), quoted


def _thermal(cfg, derived, system):
    s = "thermal"
    form = _exactly_one(cfg, s, {"temperature": ("temperature",),
                                 "occupations": ("n_c", "n_m", "n_d")})
    if form == "occupations":
        try:
            return ThermalEnvironment(n_c=cfg.float(s, "n_c", 0.0), n_m=cfg.float(s, "n_m", 0.0),
                                      n_d=cfg.float(s, "n_d", 0.0))
        except ValueError as exc:
            raise ConfigError(f"[thermal] {exc}") from None
    T = cfg.float(s, "temperature")
    if system is not None:
        omega_c, omega_d = system.omega_c, derived.omega_d_eff
    else:
        omega_c = cfg.frequency("system", "omega_c", required=False)
        if omega_c is None:
            raise cfg.error(s, "temperature",
                            "temperature needs omega_c_hz/omega_c_rads in [system] "
                            "for the cooperativity form")
        omega_d = derived.omega_m
    try:
        return ThermalEnvironment.from_temperature(T, omega_c, derived.omega_m, omega_d)
    except ValueError as exc:
        raise cfg.error(s, "temperature", str(exc)) from None


def _grid(cfg, gamma_m):
    s = "sweep"
    lo = cfg.float(s, "omega_min", -DEFAULT_SPAN)
    hi = cfg.float(s, "omega_max", DEFAULT_SPAN)
    raw = cfg.get(s, "points", str(DEFAULT_POINTS))
    try:
        points = int(raw)
    except ValueError:
        raise cfg.error(s, "points", f"expected an integer, got {raw!r}") from None
    if points < 2 or not hi > lo:
        raise ConfigError("[sweep] need omega_max > omega_min and points >= 2")
    return np.linspace(lo * gamma_m, hi * gamma_m, points)


def _signal(cfg, derived):
    s = "signal"
    if not cfg.section(s):
        return None
    return Tone(amplitude=cfg.float(s, "tone_amplitude"),
                frequency=derived.omega_m,
                phase=cfg.float(s, "tone_phase", -math.pi / 2))


def build(cfg: cfgmod.Config, solve_matching=False) -> Scenario:
    cfg = cfgmod.expand(cfg)
    if solve_matching:
        cfg.set("modulation", "mode", "solve-matching")
    derived, system = _derived(cfg)
    mods, quoted = _modulation(cfg, derived)
    env = _thermal(cfg, derived, system)
    return Scenario(config=cfg, derived=derived, mods=mods, quoted=quoted, env=env,
                    grid=_grid(cfg, derived.gamma_m), signal=_signal(cfg, derived),
                    system=system)


def sweep_rows(sc: Scenario):
    """Run the sweep and return ``(result, rows)`` with one CSV tuple per grid point."""
    result = sweep(sc.derived, sc.mods, sc.env, sc.grid)
    n_add = result.n_add
    S_N = force_noise_from_added(sc.derived, sc.env, n_add)
    sens = np.sqrt(S_N)
    rows = []
    for i, p in enumerate(result.points):
        ft = abs(force_transform(sc.signal, p.omega, sc.derived.omega_m))
        rows.append((p.omega / sc.derived.gamma_m, p.R_m, p.n_add, p.S_out, sens[i],
                     ft / sens[i] if np.isfinite(sens[i]) else math.nan))
    return result, rows


def _fmt(x):
    if isinstance(x, bool) or x is None:
        return str(x).lower()
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def stability_items(sc: Scenario, report: StabilityReport | None = None):
    report = report or stability_eigen(build_drift_matrix(sc.derived, sc.mods))
    d, m = sc.derived, sc.mods
    try:
        exact = exact_threshold_xi_m(d.C0, d.C1, m.xi_d)
    except SingularityError:
        exact = math.nan
    return [
        ("stable", report.stable),
        ("marginal", report.marginal),
        ("max_real_eigenvalue_rads", report.max_real_eigenvalue),
        ("eigenvalues_rads", " ".join(f"{z.real:.12g}{z.imag:+.12g}j" for z in report.eigenvalues)),
        ("lambda_m_rads", report.lambda_m),
        ("lambda_m_max_rads", report.lambda_m_max),
        ("lambda_d_rads", report.lambda_d),
        ("lambda_d_max_rads", report.lambda_d_max),
        ("collective_C_m", report.collective_C_m),
        ("collective_C_d", report.collective_C_d),
        ("within_analytic_bounds", report.within_analytic_bounds),
        ("xi_m_threshold_determinant", exact),
        ("C0", d.C0),
        ("C1", d.C1),
        ("xi_m", m.xi_m),
        ("xi_d", m.xi_d),
        ("xi_d_quoted", sc.quoted.xi_d),
        ("matching_residual", matching_residual(d.C0, d.C1, m.xi_m, m.xi_d)),
        ("matching_residual_quoted", matching_residual(d.C0, d.C1, sc.quoted.xi_m, sc.quoted.xi_d)),
    ]


def sweep_meta(sc: Scenario, result: SweepResult, version, timestamp):
    """Key/value records for the ``.meta`` sidecar."""
    items = [("software", "hybridsense"), ("version", version), ("timestamp", timestamp),
             ("spectral_normalization", NORMALIZATION), ("columns", ",".join(CSV_HEADER))]
    items += stability_items(sc, result.stability)
    w = result.omega / sc.derived.gamma_m
    sub = window_around(w, result.n_add, N_ADD_SQL, above=False)
    amp = window_around(w, result.R_m, 1.0, above=True)
    items += [
        ("amplification_bandwidth_over_gamma_m", result.amplification_bandwidth / sc.derived.gamma_m),
        ("sub_sql_bandwidth_over_gamma_m", result.sub_sql_bandwidth / sc.derived.gamma_m),
        ("sub_sql_window_over_gamma_m", "none" if sub is None else f"{float(sub[0])!r} {float(sub[1])!r}"),
        ("amplification_window_over_gamma_m", "none" if amp is None else f"{float(amp[0])!r} {float(amp[1])!r}"),
        ("point_errors", len(result.errors)),
    ]
    for section, keys in sc.config.sections.items():
        for key, entry in keys.items():
            items.append((f"config.{section}.{key}", entry.value))
    return [(k, _fmt(v)) for k, v in items]


def point_items(sc: Scenario, omega):
    """Single-frequency report as ordered ``(key, value)`` pairs."""
    d = sc.derived
    result = sweep(d, sc.mods, sc.env, np.array([omega]))
    p = result.points[0]
    if result.errors.get(0, "").startswith("susceptibility pole"):
        raise SingularityError(result.errors[0], omega=omega)
    S_N = float(force_noise_from_added(d, sc.env, p.n_add))
    sens = math.sqrt(S_N) if np.isfinite(S_N) else math.nan
    ft = abs(force_transform(sc.signal, omega, d.omega_m))
    dead = math.isnan(p.n_add)
    items = [
        ("omega_rads", omega),
        ("omega_over_gamma_m", omega / d.gamma_m),
        ("R_m", p.R_m),
        ("n_add", "undefined" if dead else p.n_add),
        ("S_out", p.S_out),
        ("S_N_N2_per_Hz", "undefined" if dead else S_N),
        ("sensitivity_N_per_sqrtHz", "undefined" if dead else sens),
        ("snr", "undefined" if dead else ft / sens),
        ("sub_SQL", "undefined" if dead else p.n_add < N_ADD_SQL),
        ("stable", result.stability.stable),
    ]
    if omega == 0:
        try:
            n0, R0, amp = on_resonance_formulas(d.C0, d.C1, sc.mods.xi_m, sc.mods.xi_d, sc.env)
            items += [("gain_amplitude", amp), ("G_a", amp * amp),
                      ("R_m0_closed_form", R0), ("n_add0_closed_form", n0)]
        except HybridSenseError as exc:
            items.append(("closed_form", f"unavailable ({exc})"))
        items.append(("matching_residual",
                      matching_residual(d.C0, d.C1, sc.mods.xi_m, sc.mods.xi_d)))
    return [(k, _fmt(v)) for k, v in items]
