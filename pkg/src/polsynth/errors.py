class PolsynthError(ValueError):
    """Base class for input and configuration errors raised by polsynth."""


class TableError(PolsynthError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class ConfigError(PolsynthError):
    def __init__(self, message, line=None, path=None):
        self.line = line
        loc = f"{path or '<config>'}" + (f":{line}" if line is not None else "")
        super().__init__(f"{loc}: {message}")
