"""Typed errors shared across the package.

Everything deriving from DataError means "the inputs cannot be processed"
(bad file, degenerate curve, zero-variance sample) as opposed to a usage
mistake; the command-line front end maps DataError to exit code 2.
"""


class DataError(Exception):
    """Input data cannot be processed."""


class PgmError(DataError):
    """Malformed PGM file. Carries a byte offset when one is known."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class DegenerateAcfError(DataError):
    """Autocorrelation curve does not support the requested estimate."""


class DegenerateStatsError(DataError):
    """Statistic undefined for this sample (e.g. zero variance)."""


class FitError(DataError):
    """Model fitting failed to produce a usable solution."""
