"""Exception taxonomy shared by all modules.

Two families: InvariantViolation for rejected inputs / violated contracts
(CLI exit 3) and NumericalError for trouble arising during a computation
(CLI exit 4).  File/JSON problems raise ParseError (CLI exit 2).
"""


class ParseError(ValueError):
    """Input file or JSON document does not match the expected schema."""


class InvariantViolation(ValueError):
    """A documented invariant or precondition does not hold.

    ``invariant`` carries a short machine-readable name of the violated
    condition so callers can report it without parsing the message.
    """

    def __init__(self, invariant: str, message: str = ""):
        self.invariant = invariant
        super().__init__(f"{invariant}: {message}" if message else invariant)


class DimensionMismatch(InvariantViolation):
    def __init__(self, message: str = ""):
        super().__init__("dimension_mismatch", message)


class SingularCongruence(InvariantViolation):
    def __init__(self, message: str = ""):
        super().__init__("singular_congruence", message)


class KernelConditionViolated(InvariantViolation):
    """Ker D is not contained in Ker B: the Schur complement is
    generalized-inverse dependent and inertia additivity may fail."""

    def __init__(self, message: str = ""):
        super().__init__("kernel_condition", message)


class SimplicityViolated(InvariantViolation):
    def __init__(self, message: str = ""):
        super().__init__("simple_eigenvalue", message)


class ZeroEntry(InvariantViolation):
    def __init__(self, message: str = ""):
        super().__init__("nowhere_zero_eigenvector", message)


class Disconnected(InvariantViolation):
    def __init__(self, message: str = ""):
        super().__init__("connected_graph", message)


class BetaZero(InvariantViolation):
    def __init__(self, message: str = ""):
        super().__init__("cycle_space_nonempty", message)


class NumericalError(RuntimeError):
    """Base for runtime numerical trouble (CLI exit 4)."""


class AmbiguousRank(NumericalError):
    """An eigenvalue magnitude fell in the fragile band (tol, 10*tol]:
    the inertia counts depend delicately on the tolerance.  Property
    sweeps should discard such draws."""


class BranchAmbiguity(NumericalError):
    """Eigenvector overlap fell below 1/sqrt(2); the branch assignment is
    not unique at the attempted step.  Refine the grid or reduce the step."""


class DegenerateStart(NumericalError):
    """The eigenvalue a continuation should start from is not simple."""


class NoConvergence(NumericalError):
    """Fixed-point iteration did not converge within the iteration cap."""


class GapTooSmall(NumericalError):
    """Spectral gap around the tracked eigenvalue is too small."""


class ResolventViolation(NumericalError):
    """The evaluation point is too close to a spectrum."""
