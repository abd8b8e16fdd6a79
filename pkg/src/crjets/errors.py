"""Exception hierarchy.

Validation errors mean the input violates a precondition; computation
errors mean a valid input could not be processed and point at a bug or a
numerical breakdown.
"""


class CRJetError(Exception):
    pass


class ValidationError(CRJetError, ValueError):
    pass


class ComputationError(CRJetError, RuntimeError):
    pass


class SignatureMismatch(ValidationError):
    pass


class NonRealModel(ValidationError):
    pass


class HasLowOrderTerms(ValidationError):
    pass


class DegreeExceeded(ValidationError):
    pass


class InvalidMap(ValidationError):
    pass


class SingularLinearPart(ValidationError):
    pass


class ComplexLinearPart(ValidationError):
    pass


class NonzeroZLinearPart(ValidationError):
    pass


class NotNormalized(ValidationError):
    pass


class NotInGraphShape(ValidationError):
    pass


class NoStabilization(ComputationError):
    pass


class NonRealPullback(ComputationError):
    pass


class DegenerateEvaluation(ComputationError):
    pass


class StabilityViolation(ComputationError):
    pass
