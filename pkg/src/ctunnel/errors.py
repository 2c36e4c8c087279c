"""Exception and warning types shared across the package.

The CLI maps these onto exit codes: configuration problems exit with 2,
numerical failures with 3.
"""


class CtunnelError(Exception):
    """Base class for all package errors."""


class ContractViolation(CtunnelError, ValueError):
    """An argument violates a documented precondition."""


class ConfigurationError(CtunnelError, ValueError):
    """A run configuration or discretization setup is invalid."""


class NumericDomainError(CtunnelError, ArithmeticError):
    """A quantity left its mathematical domain (e.g. V < 0 under a square root)."""


class NumericFailure(CtunnelError, RuntimeError):
    """A numerical method failed to converge or to meet its tolerance."""


class ContourPlacementError(NumericFailure):
    """A Riesz contour passes too close to a computed eigenvalue."""


class NearSpectrumError(NumericFailure):
    """The resolvent was requested at a point indistinguishable from the spectrum."""


class NormalizationError(NumericFailure):
    """An eigenvector phase could not be fixed against its WKB quasimode."""


class AliasingError(NumericFailure):
    """The h-grid is too coarse to unwrap the gap phase unambiguously."""


class ClusterAnomalyWarning(RuntimeWarning):
    """More than two eigenvalues fell into one cluster (grid likely under-resolved)."""


class LocalizationWarning(RuntimeWarning):
    """An eigenvector is not localized in the well its weight belongs to."""
