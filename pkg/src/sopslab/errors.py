"""Exception types shared across the package.

Two families matter to callers: bad inputs (rejected before any numerics
run) and numerical failures (the computation started but could not finish).
The command line maps them to exit codes 2 and 3 respectively.
"""


class DomainError(ValueError):
    """Raised when an argument is outside the documented domain of an
    operation, including configuration problems such as a step size that
    does not divide the delay."""


class NumericsError(RuntimeError):
    """Raised when a numerical procedure fails: NaN states, eigensolver
    breakdown, or an iteration that did not converge within its budget."""


class NonConvergenceError(NumericsError):
    """An iterative search ran out of budget. Carries the best residual
    seen so the caller can decide whether to retry with a larger budget."""

    def __init__(self, message: str, best_residual: float | None = None):
        super().__init__(message)
        self.best_residual = best_residual
