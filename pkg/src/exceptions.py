class PivotCarlemanError(Exception):
    pass


class InputError(PivotCarlemanError, ValueError):
    """A precondition or dimension check failed."""


class ModelParseError(InputError):
    def __init__(
        self,
        message: str,
        line: int | None = None,
        column: int | None = None,
        location: str | None = None,
    ):
        self.line = line
        self.column = column
        self.location = location

        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if location:
            where.append(location)
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class ResourceError(PivotCarlemanError):
    """A dense materialization would exceed the configured cap."""


class ConsistencyError(PivotCarlemanError):
    """The constant component of a lifted state drifted away from 1."""
