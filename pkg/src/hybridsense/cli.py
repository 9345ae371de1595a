"""Command-line entry point: ``hybridsense {sweep,design,point,stability,presets}``."""

from __future__ import annotations

import argparse
import datetime
import logging
import math
import os
import re
import sys

from . import __version__
from . import config as cfgmod
from . import io
from .design import DESIGN_MODES, design_experiment
from .errors import ConfigError, HybridSenseError, InfeasibleDesignError
from .scenario import CSV_HEADER, build, lab_system, point_items, stability_items, sweep_meta, sweep_rows

log = logging.getLogger("hybridsense")

_OMEGA_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(rads|hz|gm)\s*$")


def parse_omega(text, gamma_m):
    """``"0.5gm"`` -> 0.5 gamma_m; ``"10hz"`` -> 2 pi 10; ``"3rads"`` -> 3 (all rad/s)."""
    m = _OMEGA_RE.match(text.lower())
    if not m:
        raise ConfigError(f"--omega {text!r}: expected <number><unit> with unit rads, hz or gm")
    value, unit = float(m.group(1)), m.group(2)
    return {"rads": value, "hz": 2.0 * math.pi * value, "gm": value * gamma_m}[unit]


def _emit(items, stream=None):
    stream = stream or sys.stdout
    for key, value in items:
        print(f"{key}={value}", file=stream)


def cmd_sweep(args):
    sc = build(cfgmod.resolve(args.config), solve_matching=args.solve_matching)
    out = args.output or os.path.splitext(os.path.basename(args.config))[0] + ".csv"
    result, rows = sweep_rows(sc)
    io.write_csv(out, CSV_HEADER, rows)
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    io.write_keyvalue(io.meta_path(out), sweep_meta(sc, result, __version__, stamp))
    for i, msg in sorted(result.errors.items()):
        log.warning("row %d: %s", i, msg)
    print(out)
    return 0


def cmd_design(args):
    cfg = cfgmod.expand(cfgmod.resolve(args.config))
    mode = cfg.get("design", "mode", "consistent")
    if mode not in DESIGN_MODES:
        raise cfg.error("design", "mode", f"expected one of {DESIGN_MODES}, got {mode!r}")
    target = (cfg.float("design", "C0"), cfg.float("design", "C1"))
    fixed = lab_system(cfg, require_drive=False)
    delta_a = cfg.frequency("design", "delta_a", required=False)
    try:
        recipe = design_experiment(target, fixed, mode=mode, delta_a=delta_a)
    except InfeasibleDesignError as exc:
        if exc.recipe:
            for key, value in exc.recipe.items():
                print(f"partial {key} = {value!r}", file=sys.stderr)
        raise
    out = args.output or os.path.splitext(os.path.basename(args.config))[0] + ".recipe.txt"
    io.write_recipe(out, recipe)
    print(out)
    return 0


def cmd_point(args):
    sc = build(cfgmod.resolve(args.config), solve_matching=args.solve_matching)
    _emit(point_items(sc, parse_omega(args.omega, sc.derived.gamma_m)))
    return 0


def cmd_stability(args):
    sc = build(cfgmod.resolve(args.config), solve_matching=args.solve_matching)
    _emit((k, v if isinstance(v, str) else repr(v) if isinstance(v, float) else str(v).lower())
          for k, v in stability_items(sc))
    return 0


def cmd_presets(args):
    if args.action == "list":
        for name in cfgmod.preset_names():
            print(f"{name}\t{cfgmod.describe(name)}")
        return 0
    if not args.name:
        raise ConfigError("presets show needs a preset name")
    sys.stdout.write(cfgmod.dump(cfgmod.expand(cfgmod.from_preset(args.name))))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="hybridsense", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep", help="frequency sweep to CSV plus .meta sidecar")
    s.add_argument("config", help="config file or preset name")
    s.add_argument("-o", "--output", help="CSV path (default <config stem>.csv)")
    s.add_argument("--solve-matching", action="store_true",
                   help="replace xi_d by the exact impedance-matching solution")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("design", help="laboratory recipe for target cooperativities")
    s.add_argument("config")
    s.add_argument("-o", "--output", help="recipe path (default <config stem>.recipe.txt)")
    s.set_defaults(func=cmd_design)

    s = sub.add_parser("point", help="single-frequency report")
    s.add_argument("config")
    s.add_argument("--omega", required=True, help="e.g. 0gm, 0.1gm, 15.9hz, 100rads")
    s.add_argument("--solve-matching", action="store_true")
    s.set_defaults(func=cmd_point)

    s = sub.add_parser("stability", help="eigenvalue stability report")
    s.add_argument("config")
    s.add_argument("--solve-matching", action="store_true")
    s.set_defaults(func=cmd_stability)

    s = sub.add_parser("presets", help="list or expand built-in presets")
    s.add_argument("action", choices=("list", "show"))
    s.add_argument("name", nargs="?")
    s.set_defaults(func=cmd_presets)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except HybridSenseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
