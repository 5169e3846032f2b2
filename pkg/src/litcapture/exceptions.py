"""Exception types shared across the package.

Every error carries a short machine-readable ``code`` (the class name) so the
command line can report it as JSON.
"""


class LitCaptureError(ValueError):
    """Base class for all validation and numeric errors raised here."""

    @property
    def code(self):
        return type(self).__name__


class ZeroRecapture(LitCaptureError):
    pass


class InvalidCounts(LitCaptureError):
    pass


class InvalidSequence(LitCaptureError):
    pass


class EmptyTitle(LitCaptureError):
    pass


class ParseError(LitCaptureError):
    def __init__(self, message, record=None, line=None, source=None):
        self.record = record
        self.line = line
        self.source = source
        self.detail = message
        where = []
        if source is not None:
            where.append(str(source))
        if record is not None:
            where.append(f"record {record}")
        if line is not None:
            where.append(f"line {line}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class UnsupportedFormat(LitCaptureError):
    pass


class EmptyList(LitCaptureError):
    pass


class WindowTooLarge(LitCaptureError):
    pass


class LengthMismatch(LitCaptureError):
    pass


class DuplicateIds(LitCaptureError):
    pass


class DegenerateInput(LitCaptureError):
    pass


class InvalidParams(LitCaptureError):
    pass


class KTooLarge(LitCaptureError):
    pass


class NotConverged(LitCaptureError):
    """Power iteration hit ``max_iter``; ``scores`` holds the last iterate."""

    def __init__(self, message, scores=None, iterations=None):
        super().__init__(message)
        self.scores = scores
        self.iterations = iterations
