"""Coverage analysis and simulation of RIS-aided NOMA downlinks in Poisson networks."""

from .analytic import coverage_connected, coverage_typical, coverage_typical_general
from .channel import GammaFit, RisChannelSpec, fit_for_analysis, fit_gamma
from .mcsim import CoverageEstimate, FadingMode, estimate_coverage_connected, estimate_coverage_typical
from .params import ConfigError, SystemParams

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "CoverageEstimate",
    "FadingMode",
    "GammaFit",
    "RisChannelSpec",
    "SystemParams",
    "coverage_connected",
    "coverage_typical",
    "coverage_typical_general",
    "estimate_coverage_connected",
    "estimate_coverage_typical",
    "fit_for_analysis",
    "fit_gamma",
]
