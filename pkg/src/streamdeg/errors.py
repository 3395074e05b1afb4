"""Exception hierarchy shared by all streamdeg modules."""


class ToolkitError(Exception):
    """Base class for every error raised by this package."""


class FormatError(ToolkitError):
    """A byte stream or structured file does not match its grammar."""


class ValidationError(ToolkitError):
    """An argument or configuration violates a documented precondition."""


# --- file and stream formats ---

class MissingFile(ToolkitError):
    pass


class IoFailure(ToolkitError):
    pass


class MalformedManifest(FormatError):
    pass


class MalformedStream(FormatError):
    pass


class BadSignature(FormatError):
    pass


class UnsupportedColorspace(FormatError):
    pass


class TruncatedFrame(FormatError):
    pass


# --- sequence / trace validation ---

class DimensionMismatch(ValidationError):
    pass


class LabelLengthMismatch(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class SpanOutOfRange(ValidationError):
    pass


class InvalidK(ValidationError):
    pass


class AnomalyTooLong(ValidationError):
    pass


class TraceMismatch(ValidationError):
    pass


class InvalidConfig(ValidationError):
    pass


# --- scoring and evaluation ---

class IndexTooSmall(ValidationError):
    pass


class TooShort(ValidationError):
    pass


class DegenerateLabels(ValidationError):
    pass


class NoAnomaly(ValidationError):
    pass
