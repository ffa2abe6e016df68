"""Exception types shared across the package."""


class BudgetError(RuntimeError):
    """A requested computation would exceed its resource budget."""


class ConvergenceError(RuntimeError):
    """An iterative computation failed to converge within its step limit."""


class InsufficientDataError(ValueError):
    """An estimator or fit was given too few usable points."""


class UnreachableStateError(ValueError):
    """A target state lies outside the reachable subspace (singular Gramian)."""
