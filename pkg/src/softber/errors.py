"""Exception types shared across the package."""


class SoftBerError(ValueError):
    """Base class for all estimation errors."""


class InvalidParameterError(SoftBerError):
    """An argument violates its documented domain."""


class DegenerateDataError(SoftBerError):
    """A sample set is too small or has zero spread for bandwidth selection."""


class DegenerateClassError(SoftBerError):
    """A classification step left one class without enough members."""


class DegenerateInitializationError(DegenerateClassError):
    """Sign-based initialization produced a class with fewer than two members."""


class TraceParseError(SoftBerError):
    """A soft-output trace file contains a row that does not parse."""

    def __init__(self, path, line_number, message):
        self.path = path
        self.line_number = line_number
        super().__init__(f"{path}:{line_number}: {message}")


class TraceFormatError(SoftBerError):
    """A soft-output trace file mixes labeled and unlabeled rows."""
