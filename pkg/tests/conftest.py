import math

import pytest

from hybridsense import config as cfgmod
from hybridsense.dynamics import build_drift_matrix, stability_eigen
from hybridsense.design import design_experiment, recipe_system
from hybridsense.params import DerivedParams, ModulationSettings, ThermalEnvironment
from hybridsense.scenario import build, lab_system

GAMMA_M = 2 * math.pi * 100
KAPPA = 1e5 * GAMMA_M
ZERO_T = ThermalEnvironment(n_c=0.0, n_m=0.0, n_d=0.0)
FIG_ENV = ThermalEnvironment(n_c=0.0, n_m=1000.0, n_d=0.0)

ACCEPTANCE_RESULTS = {}


def preset(name, **overrides):
    cfg = cfgmod.from_preset(name)
    for (section, key), value in overrides.items():
        cfg.set(section, key, value)
    return build(cfg)


def coop_point(C0, C1, ratio=1.0, omega_m=1e5, mass=1e-12):
    """DerivedParams on the figure scale: kappa/gamma_m = 1e5, gamma_m = 2 pi 100."""
    return DerivedParams.from_cooperativities(C0, C1, KAPPA, GAMMA_M, GAMMA_M / ratio,
                                              omega_m=omega_m, mass=mass)


@pytest.fixture
def curve3():
    return coop_point(0.04, 0.5), ModulationSettings(0.98, 1.42)


@pytest.fixture(scope="session")
def rb_fixed():
    return lab_system(cfgmod.expand(cfgmod.from_preset("rb-lab-design")), require_drive=False)


@pytest.fixture(scope="session")
def rb_system(rb_fixed):
    return recipe_system(design_experiment((0.04, 0.5), rb_fixed), rb_fixed)


def random_stable_points(rng, n):
    """Random stable (derived, mods) pairs with rates spread over several decades."""
    out = []
    while len(out) < n:
        kappa = 10 ** rng.uniform(2, 6)
        gm = 10 ** rng.uniform(0, 3)
        gd = gm * 10 ** rng.uniform(-2, 2)
        d = DerivedParams.from_cooperativities(rng.uniform(0, 2), rng.uniform(0, 2), kappa, gm, gd)
        m = ModulationSettings(rng.uniform(-1, 1.5), rng.uniform(-1, 1.5))
        if stability_eigen(build_drift_matrix(d, m)).max_real_eigenvalue < -1e-3 * gm:
            out.append((d, m))
    return out


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        ok, line = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {line}")

