"""Exception types shared across the toolkit."""


class FFPError(Exception):
    """Base class for all toolkit errors."""


class ParseError(FFPError):
    """A file does not conform to its documented format."""

    def __init__(self, path, lineno, message):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{self.path}:{lineno}: {message}")


class DimensionMismatchError(FFPError):
    """Two objects that must share a dimension do not."""


class ConfigError(FFPError):
    """Invalid parameter values or inconsistent inputs."""
