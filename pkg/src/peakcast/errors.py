"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
NumericError -> 4.
"""


class PeakcastError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(PeakcastError):
    """Invalid configuration value or malformed config file."""


class DataError(PeakcastError):
    """Malformed or inconsistent input data."""

    def __init__(self, message, *, path=None, line=None):
        if path is not None and line is not None:
            message = f"{path}:{line}: {message}"
        elif path is not None:
            message = f"{path}: {message}"
        super().__init__(message)
        self.path = path
        self.line = line


class NumericError(PeakcastError):
    """Numerical failure (non-finite values, degenerate scaling, ...)."""


class DimensionMismatchError(NumericError):
    """Vector lengths of an operation's arguments disagree."""


class NonFiniteObjectiveError(NumericError):
    """An objective function returned NaN or infinity."""

    def __init__(self, position, value):
        super().__init__(
            f"objective returned non-finite value {value!r} at position {list(position)}"
        )
        self.position = position
        self.value = value


class PipelineStageError(PeakcastError):
    """Wraps a failure with the pipeline stage it occurred in."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
