class EdgeForgeError(Exception):
    """Base class for every error raised by edgeforge."""


class ParameterError(EdgeForgeError, ValueError):
    """A parameter is outside its admissible range."""


class DomainError(ParameterError):
    """An argument lies outside the domain of a function."""


class DivergenceError(DomainError):
    """The requested value is infinite, e.g. Li_{1/2}(1)."""


class NumericalError(EdgeForgeError, ArithmeticError):
    """A computation ran but its result cannot be trusted."""


class ConvergenceError(NumericalError):
    def __init__(
        self, message: str, last: float | None = None, previous: float | None = None
    ) -> None:
        super().__init__(message)
        self.last = last
        self.previous = previous


class SingularityError(NumericalError):
    pass


class PositivityViolationError(NumericalError):
    pass


class NumericalConsistencyError(NumericalError):
    pass


class EigensolverError(NumericalError):
    pass


class DegenerateLawError(NumericalError):
    pass
