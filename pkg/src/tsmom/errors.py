"""Exception types raised by the engine.

Every data-dependent failure derives from :class:`DataError` so the CLI can
map it to exit code 1 in one place.
"""


class TsmomError(Exception):
    """Base class for all engine errors."""


class DataError(TsmomError):
    """Input data violates a contract."""


class NonPositivePrice(DataError):
    pass


class InsufficientHistory(DataError):
    pass


class InsufficientData(DataError):
    pass


class GapInSeries(DataError):
    pass


class DuplicateRow(DataError):
    pass


class MissingRiskFree(DataError):
    def __init__(self, month):
        super().__init__(f"risk-free series does not cover {month}")
        self.month = month


class ParseError(DataError):
    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line


class UnknownFactor(ParseError):
    pass


class UnknownSector(ParseError):
    pass


class ZeroVariance(DataError):
    """The long-run variance of a stream is zero, so no t-statistic exists.

    ``stats`` optionally carries the partial strategy statistics (mean and
    annualized return are still well defined).
    """

    def __init__(self, message="stream has zero long-run variance", stats=None):
        super().__init__(message)
        self.stats = stats


class LagTooLarge(DataError):
    pass


class SingularDesign(DataError):
    pass


class NoValidCells(DataError):
    pass


class TooFewAssets(DataError):
    pass


class EmptyGroupMonth(DataError):
    def __init__(self, group, month):
        super().__init__(f"group {group} has no members with data in {month}")
        self.group = group
        self.month = month


class EmptySector(DataError):
    pass


class MissingGroup(DataError):
    pass


class SpecMismatch(DataError):
    pass
