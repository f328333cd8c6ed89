class ConfigError(ValueError):
    """A configuration value violates an invariant. The message always starts with the dotted field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class InputFormatError(ValueError):
    """An input file exists but can't be understood."""


class RemFormatError(InputFormatError):
    """A persisted REM document is malformed, from another format version, or internally inconsistent."""


class InfeasibleCoverageError(RuntimeError):
    """Raised when even the all-on configuration serves no UE, so no reward can ever be positive."""


class ConfigArgsError(ValueError):
    """The config file arguments on the command line are malformed (``--config`` given twice, no path, ...)."""
