"""Spectrum / density / antenna substitution planning for PPP cellular downlinks."""

from .coverage import (
    ConfigError,
    LoadModel,
    NetworkConfig,
    OutageResult,
    QuadratureError,
    active_probability,
    outage_probability,
    spectral_efficiency,
    user_rate,
)
from .hypergeom import (
    CoefficientTable,
    HypergeometricError,
    coeff_k,
    coefficient_table,
    gauss_2f1,
)
from .montecarlo import (
    ActivityModel,
    McConfig,
    McEstimate,
    activity_gap_report,
    simulate_active_probability,
    simulate_outage,
    simulate_spectral_efficiency,
)
from .trs import (
    DoublingReport,
    IndifferenceCurve,
    InfeasibleError,
    Lever,
    OperatingPoint,
    ScaleMode,
    TrsValue,
    doubling_scenario,
    indifference_curve,
    make_operating_point,
    required_antennas,
    required_density,
    required_spectrum,
    trs_spectrum_antennas,
    trs_spectrum_density,
)

__version__ = "0.1.0"

__all__ = [
    "ActivityModel",
    "CoefficientTable",
    "ConfigError",
    "DoublingReport",
    "HypergeometricError",
    "IndifferenceCurve",
    "InfeasibleError",
    "Lever",
    "LoadModel",
    "McConfig",
    "McEstimate",
    "NetworkConfig",
    "OperatingPoint",
    "OutageResult",
    "QuadratureError",
    "ScaleMode",
    "TrsValue",
    "active_probability",
    "activity_gap_report",
    "coeff_k",
    "coefficient_table",
    "doubling_scenario",
    "gauss_2f1",
    "indifference_curve",
    "make_operating_point",
    "outage_probability",
    "required_antennas",
    "required_density",
    "required_spectrum",
    "simulate_active_probability",
    "simulate_outage",
    "simulate_spectral_efficiency",
    "spectral_efficiency",
    "trs_spectrum_antennas",
    "trs_spectrum_density",
    "user_rate",
]
