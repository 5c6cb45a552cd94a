class DomainError(ValueError):
    """Raised when a right-hand side receives non-finite input."""


class ConfigError(ValueError):
    """Invalid scenario or incidence configuration.

    ``key`` names the offending entry when there is one, ``line`` the source
    line of the config document when the parser could locate it.
    """

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        super().__init__(message)
        self.key = key
        self.line = line


class IntegrationDiverged(RuntimeError):
    def __init__(self, step: int, what: str = "state"):
        super().__init__(f"{what} integration produced a non-finite value at step {step}")
        self.step = step
        self.what = what
