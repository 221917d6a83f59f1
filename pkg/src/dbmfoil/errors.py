"""Exception hierarchy shared by all dbmfoil modules."""


class DbmError(Exception):
    """Base class for every error raised by dbmfoil."""


class AirfoilParseError(DbmError):
    """A coordinate file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegenerateInputError(DbmError):
    """Input geometry is too small or collapsed to be usable."""


class ResamplingError(DbmError):
    """A surface cannot be resampled onto the collocation grid."""


class IncompatibleGridError(DbmError):
    """Two collocated shapes live on different grids."""


class NonRepairableShapeError(DbmError):
    """Intersection removal did not converge within the pass cap."""


class DegenerateWeightsError(DbmError):
    """Morphing weights sum to (almost) zero."""


class GenerationFailure(DbmError):
    """A shape generator could not produce a valid shape for its parameters."""


class EvaluationFailure(DbmError):
    """An aerodynamic evaluation produced no usable polar."""


class ConfigurationError(DbmError):
    """Invalid or incomplete run configuration."""


class ContractError(DbmError, ValueError):
    """A caller violated a documented precondition."""
