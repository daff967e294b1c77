"""Exception types shared across the engine."""


class SheetstackError(Exception):
    """Base class for all engine errors."""


class MalformedFile(SheetstackError):
    """Uploaded bytes could not be parsed as the declared format."""


class DuplicateTimestamp(SheetstackError):
    """A snapshot with the same timestamp already exists for this report type."""


class EmptySheet(SheetstackError):
    """The parsed sheet contains zero non-empty cells."""


class UnknownReportType(SheetstackError):
    """No snapshots have been ingested for this report type."""


class NoTableFound(SheetstackError):
    """No candidate header row with at least two non-empty cells."""


class DegenerateSeries(SheetstackError):
    """Series too short for regression (fewer than six points)."""


class TooShort(SheetstackError):
    """Series too short even for mean/variance (fewer than two points)."""


class NoInsights(SheetstackError):
    """Every group is empty and there is nothing new to report."""


class UnknownSeries(SheetstackError):
    """Series id not present in the latest pipeline run."""


class CommandParseError(SheetstackError):
    """Command text did not match the grammar. Carries help text."""

    def __init__(self, message: str, help_text: str = ""):
        super().__init__(message)
        self.help_text = help_text
