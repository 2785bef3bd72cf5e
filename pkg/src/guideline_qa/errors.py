"""Exception hierarchy shared across the package."""


class GuidelineQAError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(GuidelineQAError):
    """The document is structurally malformed (missing keys, wrong types)."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.detail = message


class ValidationError(GuidelineQAError):
    """A well-formed document violates a protocol invariant."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.detail = message


class UnknownConcept(ValidationError):
    """A condition or constraint references a concept not declared in the protocol."""


class ParseError(GuidelineQAError):
    """An event document row could not be parsed."""

    def __init__(self, message: str, row: int | None = None):
        prefix = f"row {row}: " if row is not None else ""
        super().__init__(prefix + message)
        self.row = row


class TimestampError(ParseError):
    """A timestamp field is not valid ISO-8601."""


class UnknownPatient(ParseError):
    """Strict mode: an event arrived for a patient with no admission record."""


class EmptyWindow(GuidelineQAError):
    """A time window with from == to was requested."""


class ProfileError(GuidelineQAError):
    """A compliance profile references an unknown action."""


class OverlapError(GuidelineQAError):
    """Sub-intervals passed to timeframe scoring overlap."""


class StructureMismatch(GuidelineQAError):
    """Two score trees being compared do not share the same shape."""


class LengthMismatch(GuidelineQAError):
    """Paired score vectors have different lengths."""
