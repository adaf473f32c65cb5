"""Exception types shared across the package."""


class FeedbackLearnError(Exception):
    """Base class for all errors raised by this package."""


class ShapeMismatchError(FeedbackLearnError):
    """Operands have incompatible dimensions."""


class NonFiniteError(FeedbackLearnError):
    """A computation produced NaN or infinity.

    In a feedback loop this usually means the loop gain went negative
    (positive feedback) and the iteration blew up.
    """


class UnsupportedPolicyError(FeedbackLearnError):
    """The sign policy cannot be combined with the given activation.

    A staircase activation has impulse-like gain at its jumps: only the
    sign of that gain is usable, never its magnitude.
    """


class CheckpointError(FeedbackLearnError):
    """A model checkpoint file is malformed or has the wrong version."""


class IdxFormatError(FeedbackLearnError):
    """An IDX file is malformed."""


class BadMagicError(IdxFormatError):
    """The IDX magic number does not match the expected record type."""


class TruncatedFileError(IdxFormatError):
    """The IDX file ends before the payload its header declares."""
