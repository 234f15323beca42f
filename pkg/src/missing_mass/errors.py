"""Exception hierarchy.

Every error raised on purpose by this package derives from
:class:`MissingMassError`, which itself is a :class:`ValueError` so callers
that only care about bad input can catch that.  Each class carries an
``exit_code`` used by the command-line front end.
"""


class MissingMassError(ValueError):
    exit_code = 1


class EmptySample(MissingMassError):
    """Fewer samples than the operation needs."""

    exit_code = 3


class SampleTooSmall(MissingMassError):
    exit_code = 4


class CountOutOfRange(MissingMassError):
    exit_code = 5


class IndexOutOfRange(MissingMassError, IndexError):
    exit_code = 6


class NoOccurrences(MissingMassError):
    exit_code = 7


class InvalidDelta(MissingMassError):
    exit_code = 8


class InvalidParams(MissingMassError):
    exit_code = 9


class LengthMismatch(MissingMassError):
    exit_code = 10


class InvalidR(MissingMassError):
    exit_code = 11


class SourceExhausted(MissingMassError):
    """A sequential source ran dry before the stopping rule fired."""

    exit_code = 12


class ParseError(MissingMassError):
    """Malformed incidence file.  ``line`` is 1-based, ``None`` for whole-file problems."""

    exit_code = 13

    def __init__(self, message, line=None, kind="ParseError"):
        self.line = line
        self.kind = kind
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
