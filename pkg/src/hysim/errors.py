"""Exception and warning types shared across the solver suite."""


class HysimError(Exception):
    """Base class for all hysim errors."""


class ParameterError(HysimError):
    """An externality-family parameter violates its admissibility constraints."""


class GridError(HysimError):
    """A tabulation grid is not strictly increasing or does not cover [0, 1]."""


class ShapeError(HysimError):
    """A tabulated function violates the monotonicity/curvature assumptions."""


class DegenerateModelError(HysimError):
    """The leasing utility does not dominate the advanced-service utility."""


class DistributionError(HysimError):
    """An interference distribution spec is invalid."""


class MultipleEquilibria(HysimError):
    """Best-response brackets failed to close; both limits are attached.

    Attributes:
        lower: equilibrium reached from the lower extremal point.
        upper: equilibrium reached from the upper extremal point.
    """

    def __init__(self, message, lower=None, upper=None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper


class MultiplicityWarning(UserWarning):
    """The market-equilibrium uniqueness condition could not be certified."""
