"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Bad input: out-of-domain parameters, malformed files, invalid flags."""


class SingularPointError(ValidationError):
    """Evaluation requested exactly on a singular point (lens center, rod)."""


class DomainError(ValidationError):
    """Argument outside the mathematical domain of an operation."""


class DegenerateKappaError(ValidationError):
    """kappa = 1 makes the linear part of the lens map degenerate.

    Use ``critical_points_kappa1`` for the critical set in this case.
    """


class BoundaryRegimeError(ValidationError):
    """Reduced shear exactly at a regime boundary (higher-order caustic)."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to converge or detected inconsistency."""


class NonConvergenceError(NumericalError):
    """Limit extraction did not settle; carries the sampled values."""

    def __init__(self, message, samples=None):
        super().__init__(message)
        self.samples = list(samples) if samples is not None else []
