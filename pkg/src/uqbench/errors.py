"""Exception hierarchy shared by all engine modules."""


class UQBenchError(Exception):
    """Base class for engine errors."""


class LogFormatError(UQBenchError):
    """Malformed or invalid prediction-log input.

    ``row`` is the offending 0-based record index, when known.
    """

    def __init__(self, message, row=None):
        if row is not None:
            message = f"{message} (row {row})"
        super().__init__(message)
        self.row = row


class IncompatibleKappaError(UQBenchError):
    """A kappa spec was applied to a log kind it does not support."""


class ScoreRangeError(UQBenchError):
    """Scores fall outside the range a metric requires (e.g. ECE needs [0,1])."""


class PoolError(UQBenchError):
    """Invalid C-OOD class pool or severity-level request."""
