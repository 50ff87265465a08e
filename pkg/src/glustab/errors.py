"""Exception hierarchy shared by all modules.

Each error carries an ``exit_code`` used by the command-line front end.
"""


class GlustabError(Exception):
    exit_code = 1


class PreconditionError(GlustabError):
    """An input violates a documented precondition."""

    exit_code = 3


class NotInRegion(GlustabError):
    """A point lies outside the open region an operation is defined on."""

    exit_code = 2

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class Undecidable(GlustabError):
    """Exact data is insufficient to decide the question."""

    exit_code = 4


class DegeneratePhase(PreconditionError):
    pass


class InvalidCharge(PreconditionError):
    pass


class InvalidStabilityFunction(PreconditionError):
    pass


class InvalidStability(PreconditionError):
    pass


class FreeSymbolDependence(Undecidable):
    """The result would depend on the unresolved integer in the class of the zeta-twist."""


class AmbiguousSign(Undecidable):
    """Interval arithmetic could not separate a quantity from zero."""


class BranchCut(PreconditionError):
    pass


class UnsupportedHeart(PreconditionError):
    pass


class UnsupportedObject(PreconditionError):
    pass


class InvalidDecomposition(PreconditionError):
    pass


class NotOrthogonal(PreconditionError):
    pass


class PreconditionGenus(PreconditionError):
    pass


class HypothesisViolation(PreconditionError):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class SectorViolation(PreconditionError):
    pass


class NotExtExceptional(PreconditionError):
    pass
