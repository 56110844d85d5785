"""Exception hierarchy shared by the solver modules and the CLI."""

from __future__ import annotations


class SDWaveError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for this failure."""

    exit_code = 1

    def __init__(self, message: str, *, c: float | None = None):
        super().__init__(message)
        self.c = c


class DomainError(SDWaveError, ValueError):
    """Arguments outside the domain where an operation is defined."""


class IntegrationBlowupError(SDWaveError, ArithmeticError):
    """A non-finite state appeared during integration."""


class UnderResolvedError(SDWaveError):
    """Two zeros of one function fell within a few grid cells of each other."""


class InvalidWaveError(SDWaveError):
    """The data cannot describe a closed traveling-wave profile."""


class PrecisionLimitError(SDWaveError):
    """The requested object is not representable in double precision.

    For large wave speeds the admissible slope interval shrinks below the
    spacing of floating point numbers, so no computed trajectory stays in
    the band up to s=1.
    """


class InternalContradictionError(SDWaveError):
    """A structural property that must hold was numerically violated."""

    exit_code = 3


class NoWaveFoundError(SDWaveError):
    """No sign change of the shooting mismatch on the sampled speed grid."""

    exit_code = 2

    def __init__(self, message: str, *, c_grid=None, mismatch=None):
        super().__init__(message)
        self.c_grid = c_grid
        self.mismatch = mismatch
