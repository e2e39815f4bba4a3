"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of a routine."""


class GridError(ValueError):
    """A grid does not have the structure an operation requires."""


class ConvergenceError(RuntimeError):
    """A numerical search or quadrature did not meet its tolerance."""
