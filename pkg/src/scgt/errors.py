"""Exception and warning types shared across the package."""


class ScgtError(Exception):
    """Base class for all package errors."""


class NonHermitianError(ScgtError):
    """Input matrix deviates from its conjugate transpose beyond tolerance."""


class NonConvergenceError(ScgtError):
    """An iterative linear-algebra routine failed to converge."""


class DimMismatchError(ScgtError):
    """Operands have incompatible shapes."""


class DimensionCapError(ScgtError):
    """Hilbert-space dimension exceeds the configured cap."""


class DomainError(ScgtError):
    """Parameter point outside the family's domain."""


class InconsistentDerivativeError(ScgtError):
    """Derivative carries weight where the state equation cannot support it."""


class NonPositiveProbabilityError(ScgtError):
    """Outcome probability more negative than the clipping tolerance."""


class NullDirectionDegenerateError(ScgtError):
    """Supplied probe direction is annihilated by the per-outcome tensor."""


class NullOutcomePresentError(ScgtError):
    """Operation requires strictly positive outcome probabilities."""


class NotRankOneError(ScgtError):
    """Effect is not rank-one within tolerance."""


class NotNullError(ScgtError):
    """Effect has nonzero probability where a null outcome is required."""


class NullOnStencilError(ScgtError):
    """A finite-difference stencil point produced a vanishing probability."""


class SingularFQError(ScgtError):
    """The quantum Fisher information matrix is singular within tolerance."""


class NonUnitaryError(ScgtError):
    """Matrix fails the unitarity check."""


class GridTooCoarseError(ScgtError):
    """Refinement error estimate exceeds the requested tolerance."""


class NullOutcomeOnGridError(ScgtError):
    """A surface-grid node produced a null outcome probability."""


class ScgtWarning(UserWarning):
    """Base class for package warnings."""


class SingularMatrixWarning(ScgtWarning):
    """Pseudo-inverse truncated one or more near-zero eigenvalues."""


class ClippedProbabilityWarning(ScgtWarning):
    """A tiny negative probability was clipped to zero."""


class NullOutcomeSkippedWarning(ScgtWarning):
    """A null outcome contributed nothing because no direction was supplied."""
