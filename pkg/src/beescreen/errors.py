"""Exception types shared across the package."""


class BeescreenError(Exception):
    """Base class for all package errors."""


class StructureParseError(BeescreenError):
    """Malformed structure file; carries the offending line number."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class EmptyStructureError(BeescreenError):
    """Parsing produced zero atoms."""


class SelectionError(BeescreenError):
    """Chain selection matched no atoms."""


class SerializationError(BeescreenError):
    """Value cannot be rendered in fixed-column format."""


class IncomparablePosesError(BeescreenError):
    """Two poses cannot be compared atom-by-atom."""


class MissingTableError(BeescreenError):
    """Engine log contains no result table."""


class LogParseError(BeescreenError):
    """Bad row inside an engine result table."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class MalformedResultError(BeescreenError):
    """Result table violates binding-mode ordering invariants."""


class IncompleteProfileError(BeescreenError):
    """Ligand profile lacks a mean for a required receptor."""


class ConfigurationError(BeescreenError):
    """Bad screening configuration (e.g. missing control ligand)."""


class LabelError(BeescreenError):
    """Unknown class label in prediction pairs or mapping."""


class ManifestError(BeescreenError):
    """Pipeline manifest failed to parse or references missing files."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number
