"""Exception hierarchy shared across the runtime."""


class HarmonicaError(Exception):
    """Base class for all runtime errors."""


class ValidationError(HarmonicaError):
    """A document or configuration failed validation.

    ``field`` holds a dotted/indexed path into the offending document,
    e.g. ``rules[0].metric``, so API responses can point at the exact spot.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class SequencingError(HarmonicaError):
    """A telemetry append arrived with the wrong sequence number."""


class InsufficientDataError(HarmonicaError):
    """Not enough samples/rows to perform the requested operation."""


class UnknownModelError(HarmonicaError):
    """A model_id outside the registered spectrum."""


class ConflictError(HarmonicaError):
    """Operation not permitted in the current run state."""


class NotFoundError(HarmonicaError):
    """Referenced entity (dataset, policy name) does not exist."""


class InputError(HarmonicaError):
    """Malformed runtime input (non-finite lag, bad CSV row, ...)."""
