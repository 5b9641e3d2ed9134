"""Exception hierarchy shared across the package."""


class CondsepError(Exception):
    """Base class for all package errors."""


class ValidationError(CondsepError):
    """An input violates a structural invariant (bad shape, label, weight...)."""


class HermiticityError(ValidationError):
    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"matrix is not Hermitian: max |M - M^dag| = {residual:.3e}")


class TraceError(ValidationError):
    def __init__(self, deviation: float):
        self.deviation = deviation
        super().__init__(f"trace deviates from 1 by {deviation:.3e}")


class PositivityError(ValidationError):
    def __init__(self, min_eigenvalue: float):
        self.min_eigenvalue = min_eigenvalue
        super().__init__(f"matrix is not positive semidefinite: min eigenvalue = {min_eigenvalue:.3e}")


class LabelError(ValidationError):
    """Unknown or ill-formed subsystem label."""


class UsageError(ValidationError):
    """Arguments are structurally valid but used incorrectly."""


class DimensionMismatchError(ValidationError):
    """Operator shape does not match the declared subsystem dimensions."""


class WeightError(ValidationError):
    """Decomposition weights are negative or do not sum to one."""


class DegenerateWeightsError(ValidationError):
    """Extension weights must be pairwise distinct; see dedegenerate_weights."""


class NumericalError(CondsepError):
    """Numerical failure: singular operator or inconsistent extraction."""


class SingularMatrixError(NumericalError):
    """An eigenvalue fell at or below the configured cutoff."""


class BlockStructureError(NumericalError):
    """A marginal is not block diagonal in the sigma_e eigenbasis."""


class ExtractionError(NumericalError):
    """Extracted factors fail positivity/trace checks or do not rebuild sigma."""
