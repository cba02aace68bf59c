"""Exception hierarchy shared across the package."""


class DataError(Exception):
    """Input data is missing, malformed, or insufficient for the request."""


class ParseError(DataError):
    """A panel cell could not be parsed as a number."""

    def __init__(self, token: str, row: int | None = None, col: int | None = None, path=None):
        self.token = token
        self.row = row
        self.col = col
        self.path = path
        where = []
        if path is not None:
            where.append(str(path))
        if row is not None:
            where.append(f"row {row + 1}")
        if col is not None:
            where.append(f"column {col + 1}")
        loc = f" at {', '.join(where)}" if where else ""
        super().__init__(f"cannot parse {token!r} as a number{loc}")


class InsufficientHistoryError(DataError):
    """The panels do not have enough date columns for the requested windows."""


class ConfigError(ValueError):
    """Invalid backtest or tier configuration."""
