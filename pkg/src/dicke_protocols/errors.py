"""Exception hierarchy shared by all modules."""


class DickeError(Exception):
    """Base class for every error raised by this package."""


class DomainError(DickeError, ValueError):
    """An index or parameter lies outside its allowed range."""


class DimensionError(DickeError, ValueError):
    """Two states or operators live on different qubit counts."""


class DegenerateStateError(DickeError, ValueError):
    """A vector that must be normalizable has zero norm."""


class NonPhysicalGateError(DickeError, ValueError):
    """Gate parameters violate |first|^2 + |second|^2 = 1."""


class DegenerateRunError(DickeError, RuntimeError):
    """An iterated protocol run reached a zero-probability success branch."""

    def __init__(self, message, round_index):
        super().__init__(message)
        self.round_index = round_index


class SpectralError(DickeError, ArithmeticError):
    """The composed protocol operator cannot be diagonalized as requested."""


class NumericError(DickeError, ArithmeticError):
    """A numerical routine failed to reach its residual target."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SizeError(DickeError, ValueError):
    """A full-statevector request exceeds the hard qubit cap."""
