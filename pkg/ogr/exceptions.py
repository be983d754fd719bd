class OGRError(Exception):
    """Base class for every error raised by the ogr app."""


class ContractViolation(OGRError):
    """An operation was called with inputs that break its preconditions."""


class ConfigurationError(OGRError):
    """
    A configuration value is missing, unknown or out of range.

    ``key`` is the dotted path of the offending entry and ``line`` the
    1-based line of that key in the configuration text, when known.
    """

    def __init__(self, message, key=None, line=None):
        self.message = message
        self.key = key
        self.line = line
        location = ''
        if key:
            location = f"'{key}'"
            if line is not None:
                location += f' (line {line})'
            location += ': '
        elif line is not None:
            location = f'line {line}: '
        super().__init__(f'{location}{message}')


class InsufficientSpread(OGRError):
    """
    Regression denominator is singular: the observed coordinates do not span
    the directions being fitted.
    """

    def __init__(self, message, smallest_eigenvalue=None, direction=None):
        self.smallest_eigenvalue = smallest_eigenvalue
        self.direction = direction
        super().__init__(message)


class DegenerateBasis(OGRError):
    """Orthonormalization met a (numerically) linearly dependent vector."""

    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message)


class RunFailure(OGRError):
    """A single optimizer run terminated early."""

    def __init__(self, message, label=None):
        self.label = label
        super().__init__(message)
