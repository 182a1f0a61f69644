"""Exception types raised across the package."""


class CVError(ValueError):
    """Base class for all domain errors."""


class NonGaussian(CVError):
    """Gate has no symplectic (linear quadrature) representation."""


class NonPositive(CVError):
    pass


class OutOfRange(CVError):
    pass


class Singular(CVError):
    pass


class SigmaMismatch(CVError):
    pass


class ApproximationInvalid(CVError):
    """Flat-projection / orthogonal-peak assumptions do not hold."""


class GridTooSmall(CVError):
    pass


class AsymmetricGrid(CVError):
    pass


class WrongArity(CVError):
    pass


class TruncationTooSmall(CVError):
    pass


class BudgetExhausted(CVError):
    pass


class Infeasible(CVError):
    pass


class TooLarge(CVError):
    """Materialization would exceed the requested cap."""

    def __init__(self, count: int, cap: int):
        super().__init__(f"sequence would contain {count} gates, cap is {cap}")
        self.count = count
        self.cap = cap


class TooManyModes(CVError):
    pass


class UnknownTable(CVError):
    pass
