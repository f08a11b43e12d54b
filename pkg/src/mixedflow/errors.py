class MixedFlowError(Exception):
    """Base class for all package errors."""


class DomainError(MixedFlowError, ValueError):
    """Argument outside the domain of the operation."""


class KinkError(DomainError):
    """Derivative requested exactly at a kink of the piecewise law."""


class UnsupportedOperation(MixedFlowError, TypeError):
    """Operation not defined for this conductivity model."""


class ShapeError(MixedFlowError, ValueError):
    """Mismatched or malformed array/vector shapes."""


class ConvergenceError(MixedFlowError, ArithmeticError):
    """An iterative method stopped before meeting its tolerance.

    ``bracket`` carries the last bracket (root finding) and ``history`` the
    number of iterations spent (Picard), whichever applies.
    """

    def __init__(self, message, bracket=None, history=None):
        super().__init__(message)
        self.bracket = bracket
        self.history = history


class StepRejected(MixedFlowError):
    """Requested explicit time step exceeds the stability bound."""

    def __init__(self, dt, admissible):
        super().__init__(f"dt={dt:.6g} exceeds the admissible explicit step {admissible:.6g}")
        self.dt = dt
        self.admissible = admissible


class ConfigError(MixedFlowError, ValueError):
    """Invalid run configuration; ``path`` names the offending field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
