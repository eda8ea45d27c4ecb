"""Exception hierarchy.

Every error raised on purpose by the toolkit derives from
:class:`PulseSynthError`. The CLI maps the two middle layers onto exit codes:
:class:`DataError` -> 3, :class:`NumericalError` -> 4.
"""


class PulseSynthError(Exception):
    """Base class for toolkit errors."""


class DataError(PulseSynthError, ValueError):
    """Input data is malformed, inconsistent or outside an operation's domain."""


class NumericalError(PulseSynthError, ArithmeticError):
    """A computation produced non-finite values."""


class BandSpecificationError(DataError):
    pass


class DegenerateRangeError(DataError):
    pass


class AlignmentError(DataError):
    pass


class InsufficientPeaksError(DataError):
    pass


class InsufficientDataError(DataError):
    pass


class ShapeError(DataError):
    pass


class DomainError(DataError):
    pass


class TemplateValidationError(DataError):
    """Carries the offending field path, e.g. ``theta[3]``."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class IntegrationDivergenceError(NumericalError):
    def __init__(self, t: float):
        self.t = t
        super().__init__(f"integration diverged (non-finite state) at model time t={t:.6g}")
