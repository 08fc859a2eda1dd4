"""Exception types raised across the package."""


class NbsclError(Exception):
    """Base class for all package errors."""


class NonPrimitivePolynomial(NbsclError, ValueError):
    pass


class DegreeMismatch(NbsclError, ValueError):
    pass


class DivisionByZero(NbsclError, ZeroDivisionError):
    pass


class LengthMismatch(NbsclError, ValueError):
    pass


class Singular(NbsclError, ValueError):
    pass


class RankDeficient(NbsclError, ValueError):
    pass


class NotBijective(NbsclError, ValueError):
    pass


class InvalidDimension(NbsclError, ValueError):
    pass


class DimensionUnreachable(NbsclError, ValueError):
    pass


class NotACodeword(NbsclError, ValueError):
    pass


class IndexNotFrozen(NbsclError, ValueError):
    pass


class DecodeFailure(NbsclError):
    """Algebraic decoder could not produce a codeword."""


class ConfigInvalid(NbsclError, ValueError):
    """Configuration rejected; ``lineno`` points at the offending line if known."""

    def __init__(self, message, lineno=None):
        super().__init__(message if lineno is None else f"line {lineno}: {message}")
        self.lineno = lineno
