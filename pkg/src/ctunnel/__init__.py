"""Semiclassical tunneling for complex-rotated double wells -h^2 d^2 + e^{i alpha} V."""
from .action import agmon_action, agmon_weight, complex_action, truncated_actions
from .errors import (AliasingError, ConfigurationError, ContourPlacementError, ContractViolation,
                     CtunnelError, NearSpectrumError, NormalizationError, NumericDomainError,
                     NumericFailure)
from .estimators import SpectrumEstimator, TunnelingGap, WKBQuasimode
from .gap import (asymptotic_constant_A, direct_gap, gap_prediction, gap_report,
                  rotation_analysis, wronskian_gap)
from .potential import custom, default_seal, figure, from_config, quartic, seal, validate
from .specsolve import assemble, low_lying_spectrum, riesz_projector
from .wkb import wkb_eigenvalue, wkb_quasimode

__version__ = "0.1.0"

__all__ = [
    "agmon_action", "agmon_weight", "complex_action", "truncated_actions",
    "AliasingError", "ConfigurationError", "ContourPlacementError", "ContractViolation",
    "CtunnelError", "NearSpectrumError", "NormalizationError", "NumericDomainError",
    "NumericFailure",
    "SpectrumEstimator", "TunnelingGap", "WKBQuasimode",
    "asymptotic_constant_A", "direct_gap", "gap_prediction", "gap_report",
    "rotation_analysis", "wronskian_gap",
    "custom", "default_seal", "figure", "from_config", "quartic", "seal", "validate",
    "assemble", "low_lying_spectrum", "riesz_projector",
    "wkb_eigenvalue", "wkb_quasimode",
]
