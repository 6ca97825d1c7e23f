"""Exception types raised across the package."""


class PhaseStretchError(Exception):
    """Base class for all package errors."""


class InvalidSizeError(PhaseStretchError, ValueError):
    pass


class InvalidParameterError(PhaseStretchError, ValueError):
    pass


class UnsupportedOrderError(PhaseStretchError, ValueError):
    pass


class EmptyDomainError(PhaseStretchError, ValueError):
    """Every sample was excluded from the valid evaluation domain."""


class InvalidIndexError(PhaseStretchError, IndexError):
    pass


class FormatError(PhaseStretchError, ValueError):
    """Unrecognised or unsupported file format."""


class CorruptFileError(PhaseStretchError, ValueError):
    """File header parsed but the payload is truncated or inconsistent."""


class ParseError(PhaseStretchError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
