"""Exception hierarchy.

Two families: :class:`ValidationError` for inputs that violate a structural
invariant (bad shapes, non-Hermitian data, ...) and :class:`NumericalError`
for hard failures of a numerical self-check.  The CLI maps them to exit
codes 2 and 3 respectively.
"""


class DiscreteSLError(Exception):
    """Base class for all package errors."""


class ValidationError(DiscreteSLError, ValueError):
    pass


class NumericalError(DiscreteSLError, ArithmeticError):
    pass


# -- validation ---------------------------------------------------------------

class NotHermitian(ValidationError):
    pass


class NotPositiveDefinite(ValidationError):
    pass


class P0NotPositiveDefinite(NotPositiveDefinite):
    pass


class IndexOutOfRange(ValidationError):
    pass


class InvalidBoundaryCondition(ValidationError):
    pass


class NonPositiveCoefficient(ValidationError):
    pass


class InconsistentProbabilities(ValidationError):
    pass


class SchemaError(ValidationError):
    pass


class IncompatibleSignatures(ValidationError):
    pass


class DegenerateBoundaryCondition(ValidationError):
    pass


class EmptyK(ValidationError):
    pass


class NotAnEigenvalue(ValidationError):
    pass


class DegenerateEigenvalue(ValidationError):
    pass


# -- numerical ----------------------------------------------------------------

class NoConvergence(NumericalError):
    pass


class Singular(NumericalError):
    pass


class NoChartFound(NumericalError):
    pass


class DegreeMismatch(NumericalError):
    pass


class MultiplicityMismatch(NumericalError):
    pass


class LostInvertibility(NumericalError):
    pass


class CountChangedAlongPath(NumericalError):
    pass


class Inconclusive(NumericalError):
    pass
