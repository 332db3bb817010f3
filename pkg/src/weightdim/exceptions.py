"""Exception hierarchy.

Validation problems (bad user input) derive from :class:`ValidationError`;
the CLI maps them to exit code 1.  :class:`InvariantViolation` marks a
guarantee that should hold by theory but did not, and maps to exit code 2.
"""


class WeightdimError(Exception):
    pass


class ValidationError(WeightdimError, ValueError):
    pass


class OrderingViolated(ValidationError):
    pass


class TailSumTooLarge(ValidationError):
    pass


class NonPositiveWeight(ValidationError):
    pass


class OutOfDomain(ValidationError):
    pass


class IndexOutOfRange(ValidationError, IndexError):
    pass


class LevelNotInCandidateSet(ValidationError):
    pass


class PointOnBoundary(ValidationError):
    pass


class PreconditionViolated(ValidationError):
    pass


class MisalignedGrid(ValidationError):
    pass


class GridTooLarge(ValidationError):
    pass


class InsufficientData(ValidationError):
    pass


class WitnessNotFound(WeightdimError, LookupError):
    """No witness below the requested horizon.

    Expected when the horizon is at or below the point's threshold; above it
    the existence theorem guarantees a witness, so callers should escalate.
    """


class InvariantViolation(WeightdimError, AssertionError):
    pass
