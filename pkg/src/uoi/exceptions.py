"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """Raised when an input violates an operation's preconditions."""


class DataError(ValueError):
    """Raised when an input file cannot be parsed.

    Carries the offending path and (1-based) line number when known.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
