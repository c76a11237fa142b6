"""Exception types raised by the engine."""


class QTCError(Exception):
    """Base class for engine errors."""


class DomainError(QTCError, ValueError):
    """An argument lies outside the domain of the operation."""


class TruncationError(QTCError):
    """Population reached the basis truncation shell."""

    def __init__(self, message: str, leakage: float, step: int | None = None):
        super().__init__(message)
        self.leakage = leakage
        self.step = step


class SingularityError(QTCError):
    """The tracking matrix is singular or too ill-conditioned to invert."""

    def __init__(self, message: str, t: float | None, det: float, cond: float, step: int | None = None):
        super().__init__(message)
        self.t = t
        self.det = det
        self.cond = cond
        self.step = step


class PropagationError(QTCError):
    """The short-time exponential did not converge."""

    def __init__(self, message: str, residual: float, step: int | None = None):
        super().__init__(message)
        self.residual = residual
        self.step = step
