"""Exception hierarchy shared by all riskbench modules.

Three top-level families map onto the CLI exit codes: configuration and
precondition problems (exit 2), input-data problems (exit 3), and numerical
failures (exit 4).
"""


class RiskbenchError(Exception):
    """Base class for all riskbench errors."""


class ValidationError(RiskbenchError, ValueError):
    """Invalid configuration, parameters, or preconditions (exit code 2)."""


class DimensionError(ValidationError):
    """Shape or length mismatch between paired inputs."""


class ParameterError(ValidationError):
    """A parameter is outside its admissible range."""


class DataError(RiskbenchError, ValueError):
    """Malformed or inconsistent input data, e.g. CSV parse failures (exit code 3)."""


class NumericalError(RiskbenchError, ArithmeticError):
    """Numerical failure: degenerate scales, non-positive-definite matrices (exit code 4)."""


class DegenerateAssetError(NumericalError):
    """An asset has zero variance over the estimation window."""


class DegreesOfFreedomError(NumericalError):
    """Degrees of freedom outside the range required by the requested quantity."""
