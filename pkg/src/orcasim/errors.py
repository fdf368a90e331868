"""Shared exception types.

The command-line front end maps ConfigurationError to exit code 2 and
the numerical failures (SolverInstabilityError, FitConvergenceError,
TruncationError) to exit code 3.
"""


class OrcasimError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(OrcasimError, ValueError):
    """Invalid or inconsistent user-supplied configuration."""


class DomainError(OrcasimError, ValueError):
    """Argument outside the physical domain of an operation."""


class SolverInstabilityError(OrcasimError, RuntimeError):
    """Time step too coarse for the stiffest retained frequency.

    Carries a ``diagnostics`` dict with the offending rates and the
    documented stability bound so callers can pick a finer grid.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class FitConvergenceError(OrcasimError, RuntimeError):
    """A least-squares fit did not converge; holds residual diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class LifetimeRangeError(OrcasimError, ValueError):
    """Normalized efficiency never crosses 1/e inside the sampled range."""


class EstimatorUndefinedError(OrcasimError, ZeroDivisionError):
    """A correlation estimator has a zero count in its denominator."""


class TruncationError(OrcasimError, RuntimeError):
    """Photon-number truncation too aggressive for the requested tolerance."""
