"""Exception hierarchy shared by all modules."""


class FastMuodError(Exception):
    """Base class for every error raised by this package."""


class InvalidData(FastMuodError, ValueError):
    """Input data violates a precondition (shape, finiteness, size)."""


class InvalidSpec(FastMuodError, ValueError):
    """A simulation or study specification is malformed."""


class DegenerateCurve(FastMuodError, ValueError):
    """A curve with zero spread was passed where spread is required."""


class DegenerateReference(FastMuodError):
    """The reference curve of Fast-MUOD is constant."""


class NumericalFailure(FastMuodError):
    """A numerical routine (e.g. Cholesky factorization) failed."""


class ConvergenceFailure(NumericalFailure):
    """An iterative routine hit its iteration limit.

    The last iterate is kept on ``last_iterate`` so callers can still use it.
    """

    def __init__(self, message, last_iterate=None, iterations=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.iterations = iterations
