"""Exception hierarchy.

Every error raised on bad data derives from :class:`DataError`; the CLI maps
those to exit code 2.
"""


class DataError(ValueError):
    """Base class for errors caused by invalid input data."""


class EmptyInput(DataError):
    pass


class EmptyPrecursorSet(DataError):
    pass


class MalformedSmiles(DataError):
    pass


class TooFewProducts(DataError):
    pass


class ShapeError(DataError):
    pass


class InsufficientForgottenPool(DataError):
    pass


class InsufficientClassPool(DataError):
    pass


class EmptyClass(DataError):
    pass


class BinMismatch(DataError):
    pass


class NotEnoughDistributions(DataError):
    pass


class NotADistribution(DataError):
    pass


class MissingTruth(DataError):
    pass


class MissingRoundTrip(DataError):
    pass


class MissingClass(DataError):
    pass


class EmptySample(DataError):
    pass


class DegenerateVariance(DataError):
    pass


class IdMismatch(DataError):
    pass


class SizeMismatch(DataError):
    pass


class EmptySet(DataError):
    pass


class ParameterError(DataError):
    pass


class InsufficientCandidates(DataError):
    pass


class DegenerateTask(DataError):
    pass


class KTooLarge(DataError):
    pass
