"""Exception hierarchy shared by all modules."""


class BenthicError(Exception):
    """Base class for all package errors."""


class NumericFailure(BenthicError):
    """A numerical method failed; CLI maps these to exit code 3."""


class KineticsDomainError(BenthicError, ValueError):
    """State lies outside the guarded evaluation domain of the kinetics."""

    def __init__(self, msg, node=None):
        if node is not None:
            msg = f"{msg} (node {node})"
        super().__init__(msg)
        self.node = node


class SingularParameterError(BenthicError, ValueError):
    pass


class NoNeutralWavenumberError(BenthicError, ValueError):
    pass


class CriticalPointNotFound(NumericFailure):
    pass


class DegenerateEigenvalueError(NumericFailure):
    pass


class ResonanceError(NumericFailure):
    pass


class DegenerateCubicError(NumericFailure):
    pass


class NoAmplitudeSolution(BenthicError, ValueError):
    """The requested steady amplitude does not exist for these coefficients."""


class DomainMismatchError(BenthicError, ValueError):
    pass


class ConvergenceError(NumericFailure):
    def __init__(self, msg, residual=None, iterations=None):
        super().__init__(msg)
        self.residual = residual
        self.iterations = iterations


class BranchSwitchError(NumericFailure):
    pass


class EigenSolverError(NumericFailure):
    def __init__(self, msg, kz=None):
        if kz is not None:
            msg = f"{msg} (k_z={kz})"
        super().__init__(msg)
        self.kz = kz


class IntegrationBlowUp(NumericFailure):
    def __init__(self, t):
        super().__init__(f"non-finite state at t={t:g}")
        self.t = t
