"""Exception types shared across the package."""


class CylharmError(Exception):
    """Base class for package errors."""


class DomainError(CylharmError, ValueError):
    """Argument outside the region where an expansion or function is valid."""


class PoleError(DomainError):
    """Evaluation at a pole (e.g. gamma at a non-positive integer)."""


class BranchCutError(DomainError):
    """Argument lies on a branch cut of a principal-value function."""


class CoincidentPoints(DomainError):
    """Source and field point coincide, so the fundamental solution is singular."""


class NonConvergence(CylharmError, ArithmeticError):
    """A series or quadrature exhausted its budget before reaching tolerance."""


class DegenerateSolution(CylharmError, ArithmeticError):
    """A constructed second solution is numerically dependent on the first."""


class UnderflowError(CylharmError, ArithmeticError):
    """Result is too small to represent."""


class SlowDecay(CylharmError, ValueError):
    """An outer integral lost its exponential damping (e.g. z == z0 for J0 kernels)."""


class StiffnessError(CylharmError, ArithmeticError):
    """The requested ODE solution grows beyond what explicit integration resolves."""
