"""Exception hierarchy.

Every error carries a machine-readable ``kind`` and the CLI exit code it maps
to: existence failures (a constraint on the equation coefficients is not met)
exit with 2, malformed or degenerate input with 3.
"""


class QcgleError(Exception):
    kind = "error"
    exit_code = 3


class ValidationError(QcgleError, ValueError):
    kind = "ValidationError"


class DegenerateDivisor(QcgleError, ZeroDivisionError):
    kind = "DegenerateDivisor"


class InvalidProfile(ValidationError):
    kind = "InvalidProfile"


class EmptyResult(QcgleError):
    """No sign pair of the chirp formulas is mutually consistent."""

    kind = "EmptyResult"
    exit_code = 2


class ConstraintViolated(QcgleError):
    kind = "ConstraintViolated"
    exit_code = 2


class NegativeB1Squared(QcgleError):
    kind = "NegativeB1Squared"
    exit_code = 2


class ComplexSpeed(QcgleError):
    kind = "ComplexSpeed"
    exit_code = 2


class NotPeriodic(QcgleError):
    kind = "NotPeriodic"
    exit_code = 2


class PhaseUndefined(QcgleError):
    kind = "PhaseUndefined"
    exit_code = 2


class AllPoles(QcgleError):
    kind = "AllPoles"


class GridOverflow(ValidationError):
    kind = "GridOverflow"


class PoleHit(QcgleError):
    """The intensity has a real pole at the requested point."""

    kind = "Pole"
    exit_code = 2
