"""Scenario configuration: flat INI-style files, unit suffixes, and figure presets.

A hand-rolled reader is used instead of :mod:`configparser` so that every
key keeps the line and column it came from; validation errors point there.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

from .errors import ConfigError

SECTIONS = ("scenario", "system", "modulation", "thermal", "sweep", "signal", "design")

FREQUENCY_KEYS = frozenset({
    "kappa", "omega_m", "gamma_m", "omega_c", "g_a", "omega_a", "omega_R", "gamma_d",
    "E_L", "omega_L", "omega_sw", "lambda_m", "lambda_d", "delta_a",
})
UNIT_SUFFIXES = {"_hz": 2.0 * math.pi, "_rads": 1.0}


@dataclass
class Entry:
    value: str
    line: int | None = None
    column: int | None = None


@dataclass
class Config:
    """Ordered ``section -> key -> Entry`` mapping."""

    sections: dict[str, dict[str, Entry]] = field(default_factory=dict)
    source: str = "<config>"

    def section(self, name):
        return self.sections.get(name, {})

    def has(self, section, key):
        return key in self.section(section)

    def get(self, section, key, default=None):
        entry = self.section(section).get(key)
        return default if entry is None else entry.value

    def set(self, section, key, value):
        self.sections.setdefault(section, {})[key] = Entry(str(value))

    def copy(self):
        return Config({s: {k: Entry(e.value, e.line, e.column) for k, e in keys.items()}
                       for s, keys in self.sections.items()}, self.source)

    def error(self, section, key, message):
        entry = self.section(section).get(key)
        if entry is None:
            return ConfigError(f"[{section}] {message}")
        return ConfigError(f"[{section}] {key}: {message}", entry.line, entry.column)

    def float(self, section, key, default=None):
        raw = self.get(section, key)
        if raw is None:
            if default is None:
                raise ConfigError(f"[{section}] missing required key {key!r}")
            return default
        try:
            return float(raw)
        except ValueError:
            raise self.error(section, key, f"expected a number, got {raw!r}") from None

    def frequency(self, section, base, required=True):
        """Read an angular frequency given as ``<base>_hz`` or ``<base>_rads``."""
        found = [(base + suf, scale) for suf, scale in UNIT_SUFFIXES.items()
                 if self.has(section, base + suf)]
        if len(found) > 1:
            raise self.error(section, found[1][0],
                             f"{base} given more than once ({', '.join(k for k, _ in found)})")
        if not found:
            if required:
                raise ConfigError(f"[{section}] missing required frequency {base}_hz or {base}_rads")
            return None
        key, scale = found[0]
        return self.float(section, key) * scale

    def frequency_keys(self, section):
        return {k for k in self.section(section)
                for suf in UNIT_SUFFIXES if k.endswith(suf) and k[:-len(suf)] in FREQUENCY_KEYS}


def parse(text, source="<config>"):
    cfg = Config(source=source)
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.strip()
        if not stripped:
            continue
        col = len(line) - len(line.lstrip()) + 1
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ConfigError("unterminated section header", lineno, col)
            current = stripped[1:-1].strip()
            if current not in SECTIONS:
                raise ConfigError(f"unknown section [{current}]; expected one of {SECTIONS}",
                                  lineno, col)
            if current in cfg.sections:
                raise ConfigError(f"duplicate section [{current}]", lineno, col)
            cfg.sections[current] = {}
            continue
        if "=" not in stripped:
            raise ConfigError("expected 'key = value'", lineno, col)
        if current is None:
            raise ConfigError("key outside of any section", lineno, col)
        key, value = stripped.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError("empty key", lineno, col)
        if key in FREQUENCY_KEYS:
            raise ConfigError(f"frequency key {key!r} needs a unit suffix (_hz or _rads)",
                              lineno, col)
        if key in cfg.sections[current]:
            raise ConfigError(f"duplicate key {key!r}", lineno, col)
        after = line[line.index("=") + 1:]
        value_col = line.index("=") + 2 + len(after) - len(after.lstrip())
        cfg.sections[current][key] = Entry(value, lineno, value_col)
    return cfg


def load(path):
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), source=str(path))


def dump(cfg: Config):
    """Render a config back to text; ``parse(dump(c))`` reproduces every value."""
    out = []
    for name in SECTIONS:
        if name not in cfg.sections:
            continue
        if out:
            out.append("")
        out.append(f"[{name}]")
        for key, entry in cfg.sections[name].items():
            out.append(f"{key} = {entry.value}")
    return "\n".join(out) + "\n"


# Figure presets. Shared settings: kappa/gamma_m = 1e5, n_m = 1e3, n_c = n_d = 0,
# and the laboratory mirror (mass, omega_m) for the force-referred columns.
_COMMON_SYSTEM = {
    "kappa_over_gamma_m": "1e5",
    "gamma_m_hz": "100",
    "omega_m_rads": "1e5",
    "mass": "1e-12",
}
_COMMON_THERMAL = {"n_c": "0", "n_m": "1000", "n_d": "0"}

# name -> (C0, C1, xi_m, xi_d, gamma_m/gamma_d, caption)
_CURVES = {
    "fig2-curve1": ("0.04", "0", "0.96", "0", "1", "no BEC, mechanical modulation only"),
    "fig2-curve2": ("0.04", "0.5", "0.98", "1.42", "1e2", "hybrid, gamma_m/gamma_d = 100"),
    "fig2-curve3": ("0.04", "0.5", "0.98", "1.42", "1", "hybrid, gamma_m/gamma_d = 1"),
    "fig2-curve4": ("0.04", "0.5", "0.98", "1.42", "1e-2", "hybrid, gamma_m/gamma_d = 0.01"),
    "fig2-curve5": ("0.04", "0.5", "0.92", "0", "1", "BEC without atomic modulation"),
    "fig2-curve6": ("0.5", "0.5", "0", "0", "1", "off-modulations, C0 + C1 = 1"),
    "fig2-curve7": ("0.04", "0.5", "0.9", "0.2", "1", "no impedance matching"),
    "fig3-c0.04": ("0.04", "0", "0.96", "0", "1", "no BEC, C0 = 0.04"),
    "fig3-c0.4": ("0.4", "0", "0.6", "0", "1", "no BEC, C0 = 0.4"),
    "fig3-c0.04-c0.5": ("0.04", "0.5", "0.98", "1.42", "1", "hybrid, C1/C0 = 12.5"),
    "fig3-c0.4-c0.5": ("0.4", "0.5", "0.84", "1.32", "1", "hybrid, C1/C0 = 1.25"),
    "fig3-c0.04-c0.05": ("0.04", "0.05", "0.30", "0.94", "1", "hybrid, C1/C0 = 1.25, weak"),
}

# Laboratory example: Rb BEC in a 178 um cavity. omega_c, omega_a and
# omega_R are angular values despite their customary "Hz" label.
_RB_SYSTEM = {
    "kappa_hz": "1.3e6",
    "omega_m_rads": "1e5",
    "gamma_m_hz": "100",
    "mass": "1e-12",
    "cavity_length": "178e-6",
    "omega_c_rads": "2.41494e15",
    "n_atoms": "1e5",
    "atom_mass": "1.443e-25",
    "g_a_hz": "14.1e6",
    "omega_a_rads": "2.41419e15",
    "omega_R_rads": "23.7e3",
    "gamma_d_hz": "100",
    "beam_waist": "25e-6",  # placeholder; enters only via scattering_length
}


# Mutually exclusive key groups. A user file that picks one group drops the
# preset's keys from the others during expansion.
_FREQ = lambda *names: {n + suf for n in names for suf in UNIT_SUFFIXES}  # noqa: E731
ALTERNATIVES = {
    "modulation": ({"xi_m", "xi_d"}, _FREQ("lambda_m", "lambda_d")),
    "thermal": ({"temperature"}, {"n_c", "n_m", "n_d"}),
    "system": ({"C0", "C1", "kappa_over_gamma_m", "gamma_m_over_gamma_d"},
               {"cavity_length", "n_atoms", "atom_mass", "beam_waist", "scattering_length"}
               | _FREQ("kappa", "g_a", "omega_a", "omega_R", "gamma_d", "E_L",
                       "omega_L", "omega_sw")),
}


def _curve_sections(C0, C1, xi_m, xi_d, ratio, caption, name):
    return {
        "scenario": {"preset": name, "description": caption},
        "system": {"C0": C0, "C1": C1, **_COMMON_SYSTEM, "gamma_m_over_gamma_d": ratio},
        "modulation": {"xi_m": xi_m, "xi_d": xi_d, "mode": "as-given"},
        "thermal": dict(_COMMON_THERMAL),
    }


def _presets():
    table = {name: _curve_sections(*row, name) for name, row in _CURVES.items()}
    table["rb-lab-design"] = {
        "scenario": {"preset": "rb-lab-design",
                     "description": "Rb laboratory parameters, targets C0 = 0.04, C1 = 0.5"},
        "system": dict(_RB_SYSTEM),
        "design": {"C0": "0.04", "C1": "0.5", "mode": "consistent"},
    }
    return table


PRESETS = _presets()


def preset_names():
    return list(PRESETS)


def describe(name):
    return PRESETS[name]["scenario"]["description"]


def from_preset(name):
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; see 'presets list'")
    cfg = Config(source=f"preset:{name}")
    for section, keys in PRESETS[name].items():
        for key, value in keys.items():
            cfg.set(section, key, value)
    return cfg


def expand(cfg: Config):
    """Merge a config over its preset so that it is fully explicit.

    Keys given in the file override the preset; choosing one of the
    alternative groups in :data:`ALTERNATIVES` removes the preset's keys from
    the competing groups of that section. The result names the preset
    under ``expanded_from`` and has ``preset = custom``, so expanding it
    again changes nothing.
    """
    name = cfg.get("scenario", "preset", "custom")
    if name == "custom":
        return cfg.copy()
    base = from_preset(name)
    for section, groups in ALTERNATIVES.items():
        chosen = [g for g in groups if any(k in g for k in cfg.section(section))]
        for group in groups:
            if chosen and group not in chosen:
                for key in group & set(base.section(section)):
                    del base.sections[section][key]
    for section, keys in cfg.sections.items():
        for key, entry in keys.items():
            if section == "scenario" and key == "preset":
                continue
            base.sections.setdefault(section, {})[key] = Entry(entry.value, entry.line,
                                                               entry.column)
    base.set("scenario", "preset", "custom")
    base.set("scenario", "expanded_from", name)
    base.source = cfg.source
    return base


def resolve(target):
    """Load ``target`` as a file path, or as a preset name when no such file exists."""
    if os.path.exists(target):
        return load(target)
    if target in PRESETS:
        return from_preset(target)
    raise ConfigError(f"{target!r} is neither a readable file nor a known preset")
