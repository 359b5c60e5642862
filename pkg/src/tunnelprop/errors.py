"""Exception hierarchy shared across the package."""


class TunnelPropError(Exception):
    """Base class for all package errors."""


class InvalidInputError(TunnelPropError):
    """A scalar or coordinate argument is outside its valid range."""


class InvalidParameterError(TunnelPropError):
    """A configuration parameter is invalid (e.g. non-positive voxel size)."""


class ParseError(TunnelPropError):
    """A file could not be parsed; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.line = line


class EmptyInputError(TunnelPropError):
    """An input file or collection was empty where content is required."""


class ValidationError(TunnelPropError):
    """Structured input failed a consistency check."""


class DegenerateGeometryError(TunnelPropError):
    """A geometric construction collapsed (zero-length segment, coincident points)."""


class OutOfBoundsError(TunnelPropError):
    """A query point lies outside the occupancy grid bounds."""


class NoBoundaryError(TunnelPropError):
    """A ray query found no usable solid/free boundary within range."""


class MissingAnnotationError(TunnelPropError):
    """A required annotation (e.g. corridor openings) is absent."""


class FeatureMissingError(TunnelPropError):
    """A feature required by the selected model is not available."""


class ModelValidityError(TunnelPropError):
    """Inputs fall outside the published validity range of a propagation model."""


class SingularDesignError(TunnelPropError):
    """The regression design matrix is rank deficient."""


class InsufficientDataError(TunnelPropError):
    """Fewer observations than parameters to estimate."""


class UndefinedStatisticError(TunnelPropError):
    """A statistic is undefined for the given data (e.g. constant response)."""


class DegenerateLikelihoodError(TunnelPropError):
    """Residual sum of squares is zero; the Gaussian likelihood diverges."""


class ConfigurationError(TunnelPropError):
    """A run configuration is inconsistent or references missing files."""
