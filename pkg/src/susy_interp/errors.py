"""Exception hierarchy shared by all modules."""


class SusyInterpError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(SusyInterpError, ValueError):
    """Coupling constants outside the family's validity range."""


class DomainError(SusyInterpError, ValueError):
    """Evaluation point outside the open coordinate interval."""


class BranchError(SusyInterpError, ValueError):
    """No real branch of the coupling map exists for these inputs."""


class ConvergenceError(SusyInterpError, RuntimeError):
    pass


class SingularJacobianError(ConvergenceError):
    pass


class EvaluationError(SusyInterpError, ValueError):
    """A potential returned a non-finite value on a grid point."""


class IllConditionedError(SusyInterpError, ValueError):
    pass


class PoleError(SusyInterpError, ValueError):
    """Evaluation point too close to a pole of a rational function."""


class DefectError(SusyInterpError, RuntimeError):
    """An algebraic identity check exceeded its tolerance."""
