"""
Exception types
"""


class PadeConvError(Exception):
    """Base class for all errors raised by this package"""


class NumericalError(PadeConvError, ArithmeticError):
    """A computation failed for numerical reasons"""


class NonConvergence(NumericalError):
    """An iterative method did not converge"""


class DegenerateSystem(NumericalError):
    """The Pade null space is ambiguous (two smallest singular values coincide)"""


class ZeroPrincipalCoefficient(NumericalError):
    """A dominant pole has a vanishing leading Laurent coefficient"""


class NearPole(NumericalError):
    """A point is too close to a pole of the model to evaluate it"""


class HorizonExhausted(NumericalError):
    """The orbit search did not find enough indices within its horizon"""


class NotARoot(PadeConvError, ValueError):
    """Synthetic division requested at a point which is not a root"""


class PoleAtOrigin(PadeConvError, ValueError):
    """The model must be analytic at the origin"""


class InsufficientCoefficients(PadeConvError, ValueError):
    """Not enough series coefficients for the requested Pade approximant"""


class RowMismatch(PadeConvError, ValueError):
    """The requested row is not the last intermediate row"""


class ThetaMismatch(PadeConvError, ValueError):
    """Pole arguments or declared relations are inconsistent with the locations"""


class MarginViolation(PadeConvError, ValueError):
    """A compact set does not keep its declared distance to the excluded sets"""


class ConfigError(PadeConvError, ValueError):
    """Invalid run configuration"""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
