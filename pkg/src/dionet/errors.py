"""Exception types shared across the package."""


class DionetError(Exception):
    """Base class for all errors raised by dionet."""


class ShapeError(DionetError, ValueError):
    """Operand dimensions do not line up."""


class DomainError(DionetError, ValueError):
    """An input lies outside the domain where an operation is defined."""


class NumericError(DionetError, ArithmeticError):
    """A NaN or infinity appeared where only finite values are allowed."""


class UnsupportedError(DionetError, TypeError):
    """The operation is not defined for the given kind of object."""


class RankError(DionetError, ValueError):
    """A set of vectors expected to be linearly independent is not."""


class DegenerateInputError(DionetError, ValueError):
    """The input makes a ratio or normalisation meaningless (e.g. zero norm)."""


class FormatError(DionetError, ValueError):
    """A model or polynomial document could not be parsed."""


class ConfigError(DionetError, ValueError):
    """An experiment configuration is invalid."""
