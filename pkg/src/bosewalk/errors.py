"""Exception types raised by :mod:`bosewalk`."""


class ConfigurationError(ValueError):
    """Invalid lattice, state or run parameters."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class NumericalError(RuntimeError):
    """A numerical routine failed or violated its accuracy contract."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class UsageError(ValueError):
    """An operation was applied to an object of the wrong kind."""
