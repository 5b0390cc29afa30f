"""Exception types raised across the package."""


class RFSpecError(Exception):
    """Base class for all package errors."""


class PoleHit(RFSpecError):
    """A Laplace argument coincides with an eigenvalue of the generator."""


class DegeneratePoles(RFSpecError):
    """Generator eigenvalues are not simple, so residue expansion is unavailable."""


class DegenerateExponent(RFSpecError):
    """Two exponents in a closed-form integral (nearly) coincide."""


class CapExceeded(RFSpecError):
    """Requested correlation order exceeds the configured permutation cap."""


class ZeroIntensity(RFSpecError):
    """Normalisation denominator vanishes."""


class ToleranceNotMet(RFSpecError):
    """Numerical quadrature could not reach the requested tolerance."""

    def __init__(self, message, achieved=None, requested=None):
        super().__init__(message)
        self.achieved = achieved
        self.requested = requested


class ImaginaryResidual(RFSpecError):
    """A quantity that must be real carries a significant imaginary part."""


class GridTooSmall(RFSpecError):
    """A scan axis has fewer than two points."""


class ConfigError(RFSpecError):
    """Invalid sweep configuration."""


class FallbackFailed(RFSpecError):
    """The quadrature fallback for a degenerate case did not converge."""
