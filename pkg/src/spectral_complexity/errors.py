"""Exception taxonomy shared by all stages.

DataError covers everything a caller can fix (bad files, bad flags,
malformed matrices); NumericError covers failures of the computation
itself (degenerate variance, eigensolver trouble). The CLI maps them
to exit codes 2 and 3 respectively.
"""


class SpectralComplexityError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class DataError(SpectralComplexityError):
    """Invalid input: files, flags, or matrices that violate a precondition."""

    exit_code = 2


class NumericError(SpectralComplexityError):
    """Numeric failure: degenerate data or a solver that cannot proceed."""

    exit_code = 3
