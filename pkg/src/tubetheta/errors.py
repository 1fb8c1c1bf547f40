"""Exception hierarchy shared by all modules."""


class TubeThetaError(Exception):
    """Base class for every error raised by :mod:`tubetheta`."""


class DescriptorMismatch(TubeThetaError, ValueError):
    pass


class NotInvertibleError(TubeThetaError, ArithmeticError):
    """Raised for a singular algebra element or linear map."""

    def __init__(self, message, determinant=None):
        super().__init__(message)
        self.determinant = determinant


class DomainError(TubeThetaError, ValueError):
    """The point lies outside the convergence domain (or on its boundary)."""

    def __init__(self, message, min_eigenvalue=None, boundary=False):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue
        self.boundary = boundary


class BudgetExceeded(TubeThetaError, RuntimeError):
    """The requested tolerance needs more lattice points than allowed."""

    def __init__(self, message, achieved_bound, radius):
        super().__init__(message)
        self.achieved_bound = achieved_bound
        self.radius = radius


class UnsupportedConfiguration(TubeThetaError, ValueError):
    pass


class ConfigError(TubeThetaError, ValueError):
    """Scenario file problems; carries the offending field and line if known."""

    def __init__(self, message, field=None, line=None):
        where = []
        if field:
            where.append(f"field {field!r}")
        if line:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.field = field
        self.line = line
