"""Exception types shared across the package."""


class PoleEvaluationError(ValueError):
    """A rational function was evaluated exactly at one of its poles."""


class PoleOnSetError(ValueError):
    """A pole lies inside (or dangerously close to) the integration region."""


class DivergentIntegralError(ValueError):
    """The requested singular integral does not converge (exponent >= 2)."""


class TransplantHypothesisError(ValueError):
    """The smallness hypothesis |x - x0| * potential < delta fails at x."""


class NumericalConsistencyError(ArithmeticError):
    """A computed quantity violates a bound it is guaranteed to satisfy."""


class NodeEvaluationError(ValueError):
    """A difference-quotient node could not be evaluated."""


class SingularPointError(ValueError):
    """A kernel identity was requested at one of its singular points."""


class ConditioningError(ArithmeticError):
    """A linear system is too ill-conditioned to solve reliably."""

    def __init__(self, message: str, estimate: float):
        super().__init__(f"{message} (condition estimate {estimate:.3e})")
        self.estimate = estimate


class UnsupportedRegionError(ValueError):
    """No verified representing weight is available for this region/point."""
