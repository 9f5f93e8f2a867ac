"""Exception hierarchy."""


class SeriationError(Exception):
    """Base class for errors raised by this package."""


class SizeGuardError(SeriationError, ValueError):
    """Instance too large for the requested exhaustive or table-based engine."""


class IntegrityError(SeriationError):
    """A reported objective or solution disagrees with native re-evaluation."""


class UnsupportedConstraintError(SeriationError, ValueError):
    """A tailoring constraint was attached to a model family that cannot express it."""


class SolverConfigError(SeriationError):
    """External solver missing or misconfigured."""


class SolverCapabilityError(SeriationError):
    """External solver rejected the model (e.g. no quadratic constraint support)."""


class SolverFailedError(SeriationError):
    """External solver exited with a nonzero status."""


class SolutionParseError(SeriationError):
    """Solution file could not be parsed."""


class InfeasibleError(SeriationError):
    """External solver proved the model infeasible."""


class NoIncumbentError(SeriationError):
    """A limit was reached before any feasible reordering was found."""
