"""Exception hierarchy shared by the library and the CLI."""


class SlsrError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(SlsrError, ValueError):
    """A caller-supplied parameter is outside its valid range."""


class DataError(SlsrError):
    """Input data could not be turned into a usable graph."""


class ParseError(DataError):
    def __init__(self, lineno: int, line: str, reason: str = "expected two non-negative integer ids"):
        self.lineno = lineno
        self.line = line
        super().__init__(f"line {lineno}: {reason}: {line!r}")


class EmptyGraphError(DataError):
    """The graph has no edges left after simplification."""


class SampleTooSmallError(ParameterError):
    """A sampling rate rounds down to an empty sample."""


class PeripheryShortfallError(SlsrError):
    """The periphery contains no node that a restricted crawl could start from."""


class MetricUndefinedError(SlsrError, ValueError):
    """The requested statistic is undefined on this graph."""


class InvariantViolation(SlsrError, AssertionError):
    """An internal consistency check failed."""
