"""Exception hierarchy shared by the solver, diagnostics and harness."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(ValueError):
    """A scenario or parameter set violates an admissibility condition."""

    def __init__(self, message, problems=None):
        super().__init__(message)
        self.problems = list(problems or [])


class ConvergenceError(RuntimeError):
    """An iterative solve hit its iteration cap."""


class SolverAbort(RuntimeError):
    """Time integration cannot continue."""


class StiffnessError(SolverAbort):
    pass


class NonFiniteError(SolverAbort):
    def __init__(self, message, index):
        super().__init__(message)
        self.index = index
