"""Exception hierarchy shared by every module."""


class ReebForgeError(Exception):
    """Base class for all toolkit errors."""


class InputError(ReebForgeError, ValueError):
    """Malformed or invalid input (CLI exit code 2)."""


class EmptyInput(InputError):
    pass


class DuplicateVertexInSimplex(InputError):
    pass


class DimensionOutOfRange(InputError):
    pass


class InvalidSubcomplex(InputError):
    pass


class SimplexNotInComplex(InputError):
    pass


class SubcomplexEqualsComplex(InputError):
    pass


class UnknownName(InputError):
    pass


class NotClosedPseudomanifold(InputError):
    pass


class CoefficientNotValidForNonorientable(InputError):
    pass


class NotAHomologySphere(InputError):
    pass


class BoundaryMismatch(InputError):
    pass


class NotMonotone(InputError):
    pass


class VertexNotFound(InputError):
    pass


class DomainMismatch(InputError):
    pass


class DimensionNot3(InputError):
    pass


class ExtremaNotGraphs(InputError):
    pass


class ChiMismatch(InputError):
    pass


class OrderTooLarge(InputError):
    pass


class InfeasibleSequence(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class DegenerateSampler(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(f"{where}{message}")


class RetriesExhausted(ReebForgeError):
    """The PL construction did not verify within the retry budget.

    Carries the last candidate and its verification report so callers can
    inspect what went wrong.
    """

    def __init__(self, message, candidate=None, report=None):
        super().__init__(message)
        self.candidate = candidate
        self.report = report
