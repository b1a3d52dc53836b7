"""Exception types shared across the package."""


class CompletionError(Exception):
    """Base class for solver failures."""


class DegenerateRank(CompletionError):
    """A matricization is numerically rank-deficient at the requested rank."""


class DegenerateCore(CompletionError):
    """Core tensor has no usable singular values (pseudoinverse undefined)."""


class InsufficientSamples(CompletionError):
    """Observation set is empty or otherwise too small to run the solver."""
