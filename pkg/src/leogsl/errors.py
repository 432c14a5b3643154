"""Exception hierarchy.  CLI exit codes hang off these classes."""


class LeoGslError(Exception):
    """Base class for all simulator errors."""


class ConfigurationError(LeoGslError, ValueError):
    """Invalid constellation, grid or run configuration."""


class TleParseError(LeoGslError, ValueError):
    """Malformed two-line element set."""

    def __init__(self, message, line=None, columns=None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if columns is not None:
                where += f", columns {columns[0]}-{columns[1]}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.columns = columns


class UnsupportedOrbitError(LeoGslError, ValueError):
    """Orbit outside what the two-body propagator handles."""


class GeometryError(LeoGslError, ValueError):
    """Degenerate geometry, e.g. coincident points or a satellite not in view."""


class IngestionError(LeoGslError, ValueError):
    """Bad station dataset; ``problems`` lists every offending row."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
