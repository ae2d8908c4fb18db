"""Exception hierarchy shared by all modules."""


class DptellError(Exception):
    """Base class for library errors."""


class DomainError(DptellError, ValueError):
    """A coordinate lies outside (or too close to the edge of) the domain."""


class ParameterError(DptellError, ValueError):
    """Coupling constants violate a validity restriction."""


class PoleError(DptellError, ValueError):
    """An argument sits on (or within tolerance of) a pole of Gamma or a series."""


class ConvergenceError(DptellError, ArithmeticError):
    """A series or iterative procedure did not reach its tolerance."""


class QuadratureError(ConvergenceError):
    """Quadrature refinement did not stabilise."""
