"""Exception hierarchy shared by every domlab module."""


class DomlabError(Exception):
    """Base class for all domlab errors."""


class GraphError(DomlabError, ValueError):
    """Malformed graph input: out-of-range ids, self-loops, bad node sets."""


class ParameterError(DomlabError, ValueError):
    """Model or algorithm parameters outside their valid domain."""


class BudgetExceededError(DomlabError):
    """The exact oracle refused a graph larger than its node budget."""


class ParseError(DomlabError):
    """An input file could not be parsed.

    ``line`` is the 1-based line number of the offending line, or None when
    the problem is not tied to a single line (empty file, missing file).
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)
