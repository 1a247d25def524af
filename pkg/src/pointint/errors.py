"""Exception hierarchy.

Validation-type errors map to CLI exit status 2, numerical failures to 3.
"""


class PointInteractionError(Exception):
    kind = "error"


class ValidationError(PointInteractionError):
    kind = "validation"


class NumericalError(PointInteractionError):
    kind = "numerical"


class ConstraintViolation(ValidationError):
    kind = "ConstraintViolation"

    def __init__(self, field, residual, message=None):
        self.field = field
        self.residual = residual
        super().__init__(message or f"constraint on {field!r} violated (residual {residual:.3e})")


class WrongVariant(ValidationError):
    kind = "WrongVariant"


class SideMismatch(ValidationError):
    kind = "SideMismatch"


class BelowGap(ValidationError):
    kind = "BelowGap"


class SingularSystem(NumericalError):
    kind = "SingularSystem"


class NoPreimage(NumericalError):
    kind = "NoPreimage"


class StepTooCoarse(NumericalError):
    kind = "StepTooCoarse"


class NoDiscreteSpectrum(NumericalError):
    kind = "NoDiscreteSpectrum"


class ConditioningWarning(UserWarning):
    pass
