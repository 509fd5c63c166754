"""Exception hierarchy shared by all crossnorm modules."""


class CrossnormError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(CrossnormError):
    """Arguments violate a documented precondition (shape, dims, range)."""


class InvalidStateError(CrossnormError):
    """A matrix fails a density-operator check; the message names the
    violated property (hermiticity, positivity, or normalization)."""


class InvalidChannelError(CrossnormError):
    """A Kraus family violates the trace-non-increase condition."""


class DegenerateBranchError(CrossnormError):
    """Post-selection on a branch of (numerically) zero probability."""


class NumericalFailureError(CrossnormError):
    """A numerical routine failed to converge or to certify a result."""


class InternalError(CrossnormError):
    """An internal invariant was violated; indicates a bug, not bad input."""
