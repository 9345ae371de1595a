"""Linear-response model of a parametrically driven hybrid BEC-optomechanical force sensor."""

__version__ = "0.1.0"

from .design import (LabRecipe, OperatingPoint, design_experiment, matching_residual,  # noqa: E402
                     solve_xi_d, solve_xi_m, verify_operating_point)
from .dynamics import (DriftMatrix, StabilityReport, build_drift_matrix,  # noqa: E402
                       exact_threshold_xi_m, stability_eigen)
from .errors import (ConfigError, ConvergenceError, HybridSenseError,  # noqa: E402
                     InfeasibleDesignError, NumericError, SingularityError)
from .params import (DerivedParams, ModulationSettings, SystemParams,  # noqa: E402
                     ThermalEnvironment, derive, thermal_occupation)
from .response import chi_closed_form, susceptibility_full, transfer_functions  # noqa: E402
from .sensing import Tone, TabulatedForce, sensitivity, snr  # noqa: E402
from .spectra import SweepResult, added_noise, on_resonance_formulas, sweep  # noqa: E402

__all__ = [
    "ConfigError", "ConvergenceError", "DerivedParams", "DriftMatrix", "HybridSenseError",
    "InfeasibleDesignError", "LabRecipe", "ModulationSettings", "NumericError", "OperatingPoint",
    "SingularityError", "StabilityReport", "SweepResult", "SystemParams", "TabulatedForce",
    "ThermalEnvironment", "Tone", "added_noise", "build_drift_matrix", "chi_closed_form",
    "derive", "design_experiment", "exact_threshold_xi_m", "matching_residual",
    "on_resonance_formulas", "sensitivity", "snr", "solve_xi_d", "solve_xi_m",
    "stability_eigen", "susceptibility_full", "sweep", "thermal_occupation",
    "transfer_functions", "verify_operating_point",
]
