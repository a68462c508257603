"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class SolverError(RuntimeError):
    """A root bracket could not be established or the solver did not converge."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature ran out of its subdivision budget before meeting tolerance."""


class FitError(RuntimeError):
    """Neither admissible family fits the sampled function."""
