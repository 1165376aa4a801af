"""Exception types raised by the numerical routines."""


class DqptError(Exception):
    """Base class for numerical failures (the CLI maps these to exit status 1)."""


class DegenerateModeError(DqptError, ValueError):
    """A momentum mode is gapless, so the quench quantities are undefined."""


class NoCriticalMomentumError(DqptError, ValueError):
    """The closed-form critical momentum has a vanishing denominator."""


class NotAvailableError(DqptError, NotImplementedError):
    """A closed form is not known for the requested model."""


class QuadratureError(DqptError, ArithmeticError):
    """Adaptive quadrature failed to converge.

    The best available estimate is kept on ``estimate``.
    """

    def __init__(self, message, estimate):
        super().__init__(message)
        self.estimate = estimate


class GroundStateDegeneracyError(DqptError, ValueError):
    """The lowest many-body level is degenerate within tolerance.

    Perturbing the flux by ~1e-8 usually lifts an accidental degeneracy.
    """


class BasisTooLargeError(DqptError, ValueError):
    """The Fock space dimension exceeds the configured cap."""
