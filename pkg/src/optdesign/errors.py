"""Exception hierarchy.

Errors split into two families mirroring the CLI exit-code contract:
``InputError`` covers malformed or inadmissible inputs (exit code 1),
``NumericalError`` covers failures of the numerics themselves (exit
code 2).  Singular information matrices are deliberately *not* raised
by the criterion evaluators, which return ``inf`` instead; only
operations that need an invertible matrix (sensitivities) raise
``SingularInformation``.
"""


class OptDesignError(Exception):
    """Base class for all package errors."""


class InputError(OptDesignError):
    """Bad or inadmissible input (CLI exit code 1)."""


class NumericalError(OptDesignError):
    """Numerical failure or unmet tolerance (CLI exit code 2)."""


class InvalidSpec(InputError):
    """Malformed JSON document or violated structural invariant."""


class OutOfRegion(InputError):
    """A point violates the experimental-region bounds by more than the tolerance."""


class NonpositiveLinearComponent(InputError):
    """The linear component f(x)'beta is not positive where the gamma model requires it."""


class OutOfParameterRegion(InputError):
    """A reduced parameter lies outside its admissible range."""


class WrongModelShape(InputError):
    """A closed form was requested for a model it does not apply to."""


class WeightSumViolation(InputError):
    """Design or orbit weights do not sum to one within tolerance."""


class RescaleUndefined(InputError):
    """Intercept-preserving rescale factor undefined (nonpositive intercept image)."""


class NonAxisAlignedImage(InputError):
    """A uniform measure or box region was pushed through a non-coordinatewise-affine map."""


class NotRegionPreserving(InputError):
    """A generator does not map the experimental region onto itself."""


class CandidateSetNotClosed(InputError):
    """Candidate set is not closed under the group action; carries the missing images."""

    def __init__(self, message, missing=None):
        super().__init__(message)
        self.missing = missing


class GroupTooLarge(InputError):
    """Group closure exceeded the size cap."""


class NotEquivariant(InputError):
    """Basis is not linearly equivariant under the given point map."""


class DegenerateSample(InputError):
    """No nonsingular basis sample could be found to derive the transform matrix."""


class SingularInformation(NumericalError):
    """Information matrix is singular where an inverse is required."""


class NoConvergence(NumericalError):
    """Weight iteration did not meet its tolerance; carries the final gap."""

    def __init__(self, message, gap=None, iterations=None):
        super().__init__(message)
        self.gap = gap
        self.iterations = iterations


class EquivalenceCheckFailed(NumericalError):
    """Optimality certificate failed; carries the worst violation location."""

    def __init__(self, message, worst_point=None, max_sensitivity=None, bound=None):
        super().__init__(message)
        self.worst_point = worst_point
        self.max_sensitivity = max_sensitivity
        self.bound = bound


class EmptyGrid(InputError):
    """A parameter grid was empty."""
