"""Exception hierarchy shared by every module."""


class FracsyncError(Exception):
    """Base class for all package errors."""


class DomainError(FracsyncError, ValueError):
    """An argument lies outside the domain of an operation."""


class ConfigurationError(FracsyncError, ValueError):
    """Unknown name, missing parameter or inconsistent setup."""


class ConvergenceError(FracsyncError, ArithmeticError):
    """A series or iteration did not converge within its cap."""


class NumericError(FracsyncError, ArithmeticError):
    """The vector field produced NaN during integration."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class EncodingError(FracsyncError, ValueError):
    """A plaintext symbol cannot be represented by the codec."""


class DecodingError(FracsyncError, ValueError):
    """A ciphertext code is out of range for the codec."""


class KeyExhaustionError(FracsyncError, ValueError):
    """A key source yielded fewer keys than symbols."""
