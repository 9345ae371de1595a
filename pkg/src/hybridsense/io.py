"""Plain-text outputs: sweep CSV, ``.meta`` sidecar, and lab recipe files."""

from __future__ import annotations

import csv
import math
import os

from .errors import ConfigError

CSV_FORMAT = ".11e"  # 12 significant digits

RECIPE_UNITS = {
    "mode": "", "C0_target": "1", "C1_target": "1",
    "omega_sw": "rad/s", "omega_d": "rad/s", "delta_a": "rad/s", "omega_L": "rad/s",
    "U0": "rad/s", "g0": "rad/s", "G0": "rad/s", "x_zp": "m", "Delta0": "rad/s",
    "n_cav": "photons", "E_L": "s^-1/2", "omega_c": "rad/s", "omega_c_shift": "rad/s",
}


def _num(x):
    x = float(x)
    return "nan" if math.isnan(x) else format(x, CSV_FORMAT)


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_num(v) for v in row])


def read_csv(path):
    """Return ``(header, rows)`` with rows as float tuples."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        rows = [tuple(float(v) for v in row) for row in reader]
    return header, rows


def meta_path(csv_path):
    return os.path.splitext(csv_path)[0] + ".meta"


def write_keyvalue(path, items, units=None):
    units = units or {}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in items:
            unit = units.get(key)
            fh.write(f"{key} = {value}  # {unit}\n" if unit else f"{key} = {value}\n")


def read_keyvalue(path):
    """Parse ``key = value  [# comment]`` lines into an ordered dict of strings."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("  #", 1)[0].strip()
            if not line:
                continue
            if " = " not in line:
                raise ConfigError("expected 'key = value'", lineno, 1)
            key, value = line.split(" = ", 1)
            out[key.strip()] = value.strip()
    return out


def recipe_items(recipe):
    """Recipe entries keyed with explicit ``_rads`` suffixes for angular quantities."""
    items = []
    for key, value in recipe.as_dict().items():
        name = key + "_rads" if RECIPE_UNITS.get(key) == "rad/s" else key
        items.append((name, value if isinstance(value, str) else repr(float(value))))
    return items


def recipe_units():
    return {(k + "_rads" if u == "rad/s" else k): u for k, u in RECIPE_UNITS.items() if u}


def write_recipe(path, recipe):
    write_keyvalue(path, recipe_items(recipe), recipe_units())


def read_recipe(path):
    """Inverse of :func:`write_recipe`: a dict keyed by :class:`LabRecipe` field names."""
    raw = read_keyvalue(path)
    out = {}
    for key, value in raw.items():
        name = key[:-len("_rads")] if key.endswith("_rads") else key
        out[name] = value if name == "mode" else float(value)
    return out
