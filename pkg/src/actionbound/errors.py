"""Exception types raised across the package."""


class ActionBoundError(Exception):
    """Base class for all package errors."""


class NotHermitian(ActionBoundError, ValueError):
    """A matrix expected to be Hermitian is not, within tolerance."""


class NotUnitary(ActionBoundError, ValueError):
    """A matrix expected to be unitary is not, within tolerance."""


class DimMismatch(ActionBoundError, ValueError):
    """Operands have incompatible dimensions."""


class BranchAmbiguity(ActionBoundError, ArithmeticError):
    """A logarithm would have to choose between branches (eigenphase near pi)."""


class OutOfSchedule(ActionBoundError, ValueError):
    """A piecewise-constant schedule was evaluated past its last breakpoint."""


class ToleranceNotMet(ActionBoundError, ArithmeticError):
    """Step halving stopped converging before reaching the requested tolerance."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class GridMismatch(ActionBoundError, ValueError):
    """Two evolutions were sampled on different time grids."""


class DegenerateGap(ActionBoundError, ArithmeticError):
    """Eigenvalue clusters are too close to be separated reliably."""


class LevelCrossing(ActionBoundError, ArithmeticError):
    """Spectral clusters change multiplicity or order along a path."""


class MViolated(ActionBoundError, ValueError):
    """A declared uniform norm bound M is exceeded by the sampled Hamiltonian."""


class SmoothnessUnavailable(ActionBoundError, ValueError):
    """An envelope lacks the derivative order a bound needs."""


class EmptySequence(ActionBoundError, ValueError):
    """A product formula was given no factors."""


class NoErgodicLimit(ActionBoundError, ValueError):
    """A kick sequence has no declared or computable average generator."""


class KappaTooLarge(ActionBoundError, ValueError):
    """The coupling violates the step condition of the generalized product formula."""


class Inconclusive(ActionBoundError, ValueError):
    """The two generators share spectrum and multiplicities, so no divergence claim applies."""


class UnknownScenario(ActionBoundError, KeyError):
    """No scenario is registered under the requested name."""


class BadParam(ActionBoundError, ValueError):
    """A scenario parameter is unknown or has an invalid value."""


class BoundViolation(ActionBoundError, AssertionError):
    """A numerically evaluated quantity exceeded a bound that must hold."""
