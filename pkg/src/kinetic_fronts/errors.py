"""Exception types shared across the solvers."""


class ConvergenceError(RuntimeError):
    """An iterative solver exhausted its budget without meeting its tolerance."""


class ConsistencyError(RuntimeError):
    """An internal invariant (positivity, eigenvalue match, bound preservation) failed."""


class ResolutionError(ValueError):
    """A grid or truncation is too coarse for the requested computation."""
