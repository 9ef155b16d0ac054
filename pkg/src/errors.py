"""
Exception hierarchy shared by the library modules
The command line front end maps these onto exit codes
"""


class GammaGeometryError(Exception):
    """Root of all library errors"""


class DomainError(GammaGeometryError, ValueError):
    """A parameter, support point or chart point violates its domain"""

    def __init__(self, message, invariant=None):
        super().__init__(message)
        self.invariant = invariant or message


class SingularMetricError(DomainError):
    """Metric matrix is singular or numerically indefinite"""

    def __init__(self, message, condition_number=float('inf')):
        super().__init__(f"{message} (condition number {condition_number:.3e})",
                         invariant='metric positive definite')
        self.condition_number = condition_number


class StepUnderflowError(DomainError):
    """A finite-difference stencil left the parameter domain"""


class NonConvergenceError(GammaGeometryError, RuntimeError):
    """An iterative method stopped before reaching its tolerance"""

    def __init__(self, message, residual=None, trace=None):
        super().__init__(message)
        self.residual = residual
        self.trace = trace or []


class ChartExitError(DomainError):
    """An integrated curve left the chart; carries the last state inside it"""

    def __init__(self, message, last_point=None, last_velocity=None, last_time=None):
        super().__init__(message, invariant='curve inside chart')
        self.last_point = last_point
        self.last_velocity = last_velocity
        self.last_time = last_time
