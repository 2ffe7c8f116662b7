"""Exception hierarchy shared by every module."""


class DomainError(ValueError):
    """Input outside the domain of an operation (bad shape, wrong index, ...)."""


class NotSelfAdjointError(DomainError):
    """The operator is not self-adjoint for the given metric."""

    def __init__(self, message, asymmetry=None):
        super().__init__(message)
        self.asymmetry = asymmetry


class DegenerateMetricError(DomainError):
    """The metric has a zero eigenvalue at the rank tolerance."""


class DegenerateRestrictionError(DomainError):
    """The metric restricted to a subspace is degenerate."""


class SingularMatrixError(ArithmeticError):
    pass


class NumericalFailure(ArithmeticError):
    """A computation could not be completed within tolerance.

    ``partial`` carries whatever was computed before the failure, and
    ``diagnostics`` the magnitudes that triggered it.
    """

    def __init__(self, message, partial=None, diagnostics=None):
        super().__init__(message)
        self.partial = partial
        self.diagnostics = dict(diagnostics or {})
