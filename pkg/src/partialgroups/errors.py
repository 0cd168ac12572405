"""Exception types shared across the package."""


class PartialGroupError(Exception):
    """Base class; carries an optional witness (a word, a triple, a subgroup)."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class DomainViolation(PartialGroupError):
    pass


class NotASubgroup(PartialGroupError):
    pass


class InvalidMorphism(PartialGroupError):
    pass


class IndexOutOfRange(PartialGroupError):
    pass


class BudgetExceeded(PartialGroupError):
    pass


class InvalidTwistingPair(PartialGroupError):
    pass


class DegreeOutOfRange(PartialGroupError):
    pass


class NoLiftExists(PartialGroupError):
    pass


class EmptyDelta(PartialGroupError):
    pass


class DeltaNotClosed(PartialGroupError):
    pass


class NotAGroup(PartialGroupError):
    pass


class PreconditionNotMet(PartialGroupError):
    pass


class SylowConditionFails(PartialGroupError):
    pass


class SearchFailed(PartialGroupError):
    pass


class NoCompatibleSylow(PartialGroupError):
    pass


class AxiomsFailed(PartialGroupError):
    pass


class ParseError(PartialGroupError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})" if line else message)
        self.line = line
        self.column = column
