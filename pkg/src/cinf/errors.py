"""Exception hierarchy for the cinf kernel."""


class CinfError(Exception):
    """Base class for every error raised by cinf."""


class DomainError(CinfError, ArithmeticError):
    """A partial primitive (recip, log) received an argument outside its domain."""


class ArityMismatch(CinfError, ValueError):
    pass


class NotPolynomial(CinfError, ValueError):
    pass


class QuadratureFailure(CinfError, ArithmeticError):
    pass


class DuplicateName(CinfError, ValueError):
    pass


class MissingImage(CinfError, KeyError):
    pass


class RingMismatch(CinfError, ValueError):
    pass


class TargetMismatch(CinfError, ValueError):
    pass


class ShapeMismatch(CinfError, ValueError):
    pass


class PreconditionUnverified(CinfError):
    """A hypothesis needed by a construction could not be certified."""


class WitnessMissing(CinfError):
    pass


class NoUpperBound(CinfError):
    pass


class CoconeIncoherent(CinfError):
    pass


class NotAChain(CinfError, ValueError):
    pass


class ParseError(CinfError):
    """Error in S-expression input, carrying a 1-based source location."""

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class SexprSyntaxError(ParseError):
    pass


class UnknownSymbol(ParseError):
    pass


class ArityError(ParseError):
    pass
