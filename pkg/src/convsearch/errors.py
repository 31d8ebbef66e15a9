"""Exception types shared across the package."""


class ConvSearchError(Exception):
    """Base class for package errors."""


class ConfigurationError(ConvSearchError):
    """Bad or missing configuration / fixture data."""


class TrainingError(ConvSearchError):
    """A learner could not be fit on the given data."""


class DimensionError(ConvSearchError):
    """Vector width mismatch between model and input."""


class SequencingError(ConvSearchError):
    """Turn records appended out of order."""


class SessionNotFoundError(ConvSearchError):
    """Unknown session id."""


class SessionFinalizedError(ConvSearchError):
    """Session already rated/closed; no further turns accepted."""


class IngestError(ConvSearchError):
    """A feed document could not be parsed.

    ``offset`` is the byte offset of the first error when known.
    """

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset


class InputError(ConvSearchError):
    """Invalid analytics/statistics input (too small, empty side, ...)."""
