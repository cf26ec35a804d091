"""Exception hierarchy shared by every module."""


class MXMapError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(MXMapError, ValueError):
    """Invalid user parameter (lag, dimension, neighbor count, threshold...)."""


class DataError(MXMapError, ValueError):
    """Malformed or inconsistent input data."""


class DegenerateInputError(MXMapError, ArithmeticError):
    """A statistic is undefined for the input, e.g. correlation of a constant series."""


class SingularConditioningError(DegenerateInputError):
    """Conditioning variable is perfectly correlated with one of the operands."""


class GenerationError(MXMapError, RuntimeError):
    """Simulation failed to produce a bounded trajectory."""


class PathLimitError(MXMapError, RuntimeError):
    """Simple-path enumeration exceeded its cap."""
